"""Random-walk indices: hitting and commute times, Kirchhoff index, cover costs,
random target times, Kemeny's constant and the mean hitting time.

Per-pair quantities are computed from one linear solve each.  Whole-graph
indices come from the dense Laplacian pseudoinverse ``G = L^+``: with
``g = G d`` (``d`` the degree vector) and ``2m = sum(d)``,

    h(i,j) = 2m (G_jj - G_ij) + g_i - g_j,

from which every other index is a closed-form reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .electrical import LaplacianSolver, component_view, laplacian_pinv
from .errors import IdentityViolation, ParameterError
from .graph import INF, Graph, derive_seed, is_connected

REL_TOL = 1e-8
# largest graph for which the dense pseudoinverse is formed (about 290 MB)
DENSE_INDEX_LIMIT = 6000


def _require_edges(g: Graph) -> None:
    if g.n < 2 or g.m == 0:
        raise ParameterError("random-walk indices need a graph with at least one edge")


def stationary(g: Graph) -> np.ndarray:
    """Stationary masses ``pi(u) = deg(u) / 2m``."""
    _require_edges(g)
    d = g.degrees.astype(float)
    return d / d.sum()


def _close(a: float, b: float, rel: float = REL_TOL) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


def hitting_column(g: Graph, j: int, solver: LaplacianSolver | None = None) -> np.ndarray:
    """``h(., j)`` for a connected graph: solves ``L h = d`` off ``j`` with ``h_j = 0``."""
    _require_edges(g)
    solver = solver or LaplacianSolver(g)
    h, _ = solver.grounded_solve(j, g.degrees.astype(float))
    return h


def hitting_time(g: Graph, i: int, j: int) -> float:
    """Expected steps for a simple random walk started at ``i`` to reach ``j``."""
    g._check_vertex(i)
    g._check_vertex(j)
    if i == j:
        return 0.0
    view = component_view(g, i, j)
    if view is None:
        return INF
    sub, a, b = view
    return float(hitting_column(sub, b)[a])


def _lookup(resistances, a: int, b: int) -> float:
    if a == b:
        return 0.0
    if isinstance(resistances, np.ndarray):
        return float(resistances[a, b])
    for key in ((a, b), (b, a)):
        if key in resistances:
            return float(resistances[key])
    raise ParameterError(f"resistance R({a},{b}) missing")


def hitting_time_tetali(g: Graph, i: int, j: int,
                        resistances: Mapping[tuple[int, int], float] | np.ndarray) -> float:
    """``h(i,j) = m R(i,j) + sum_u deg(u)/2 [R(j,u) - R(u,i)]``."""
    _require_edges(g)
    deg = g.degrees
    terms = [g.m * _lookup(resistances, i, j)]
    terms.extend(deg[u] / 2.0 * (_lookup(resistances, j, u) - _lookup(resistances, u, i))
                 for u in range(g.n))
    return math.fsum(terms)


def commute_time(g: Graph, i: int, j: int, *, check: bool = True) -> float:
    """``kappa(i,j) = 2m R(i,j)``, optionally checked against ``h(i,j) + h(j,i)``."""
    from .electrical import exact_resistance

    _require_edges(g)
    if i == j:
        return 0.0
    r = exact_resistance(g, i, j).value
    if math.isinf(r):
        return INF
    view = component_view(g, i, j)
    sub = view[0]
    kappa = 2.0 * sub.m * r
    if check:
        alt = hitting_time(g, i, j) + hitting_time(g, j, i)
        if not _close(kappa, alt):
            raise IdentityViolation(f"2mR={kappa!r} but h+h'={alt!r}")
    return kappa


class WalkPotentials:
    """Dense pseudoinverse of a connected graph with the derived vectors cached."""

    def __init__(self, g: Graph):
        _require_edges(g)
        if not is_connected(g):
            raise ParameterError("graph is disconnected")
        if g.n > DENSE_INDEX_LIMIT:
            raise ParameterError(
                f"whole-graph indices use a dense pseudoinverse; n={g.n} exceeds {DENSE_INDEX_LIMIT}")
        self.g = g
        self.n = g.n
        self.m = g.m
        self.deg = g.degrees.astype(float)
        self.pi = self.deg / self.deg.sum()
        self.gamma = laplacian_pinv(g)
        self.diag = np.diag(self.gamma).copy()
        self.gvec = self.gamma @ self.deg

    def hitting(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        gm = self.gamma
        return float(2 * self.m * (self.diag[j] - gm[i, j]) + self.gvec[i] - self.gvec[j])

    def resistance(self, i: int, j: int) -> float:
        return float(self.diag[i] + self.diag[j] - 2.0 * self.gamma[i, j])

    def hitting_matrix(self) -> np.ndarray:
        h = 2 * self.m * (self.diag[None, :] - self.gamma)
        h += self.gvec[:, None] - self.gvec[None, :]
        np.fill_diagonal(h, 0.0)
        return h

    def resistance_matrix(self) -> np.ndarray:
        return self.diag[:, None] + self.diag[None, :] - 2.0 * self.gamma

    @property
    def kirchhoff(self) -> float:
        return float(self.n * self.diag.sum())

    def cover_costs(self) -> np.ndarray:
        # rows of L^+ sum to zero, so sum_j h(i,j) = 2m tr(L^+) + n g_i
        return (2 * self.m * self.diag.sum() + self.n * self.gvec) / (self.n - 1)

    @property
    def uniform_cover(self) -> float:
        return float(2 * self.m * self.diag.sum() / (self.n - 1))

    def random_targets(self) -> np.ndarray:
        return 2 * self.m * self.diag - 2 * self.gvec + float(self.pi @ self.gvec)

    @property
    def kemeny(self) -> float:
        return float(self.deg @ self.diag - self.pi @ self.gvec)

    @property
    def mean_hitting(self) -> float:
        return float(self.pi @ self.random_targets())


def kirchhoff_index(g: Graph) -> float:
    """Sum of effective resistances over unordered pairs, ``n tr(L^+)``."""
    _require_edges(g)
    if not is_connected(g):
        return INF
    return WalkPotentials(g).kirchhoff


def cover_cost(g: Graph, i: int) -> float:
    """``cc_i``: mean of ``h(i, j)`` over the other ``n - 1`` vertices."""
    g._check_vertex(i)
    _require_edges(g)
    if not is_connected(g):
        return INF
    return float(WalkPotentials(g).cover_costs()[i])


def uniform_cover_cost(g: Graph, *, check: bool = True) -> float:
    """Mean hitting time over ordered pairs, checked against ``2mK / (n(n-1))``."""
    _require_edges(g)
    if not is_connected(g):
        return INF
    w = WalkPotentials(g)
    direct = float(w.hitting_matrix().sum()) / (g.n * (g.n - 1))
    if check:
        via_k = 2 * g.m * w.kirchhoff / (g.n * (g.n - 1))
        if not _close(direct, via_k):
            raise IdentityViolation(f"ccbar={direct!r} but 2mK/(n(n-1))={via_k!r}")
    return direct


def random_target(g: Graph, j: int) -> float:
    """``H_j = sum_i pi(i) h(i, j)``."""
    g._check_vertex(j)
    _require_edges(g)
    if not is_connected(g):
        return INF
    return float(WalkPotentials(g).random_targets()[j])


def kemeny_from_rows(g: Graph) -> np.ndarray:
    """``sum_j pi(j) h(i, j)`` for every start ``i``, from the explicit hitting matrix."""
    w = WalkPotentials(g)
    return w.hitting_matrix() @ w.pi


def kemeny(g: Graph, *, start: int = 0, check: bool = True, atol: float = 1e-9) -> float:
    """Kemeny's constant evaluated from ``start``; ``check`` asserts start-independence."""
    _require_edges(g)
    if not is_connected(g):
        return INF
    g._check_vertex(start)
    rows = kemeny_from_rows(g)
    if check:
        spread = float(np.max(np.abs(rows - rows[start])))
        if spread > atol * max(1.0, abs(rows[start])):
            raise IdentityViolation(f"Kemeny constant depends on the start (spread {spread:.3e})")
    return float(rows[start])


def mean_hitting(g: Graph) -> float:
    """``T = sum_{i,j} pi(i) pi(j) h(i, j)``."""
    _require_edges(g)
    if not is_connected(g):
        return INF
    w = WalkPotentials(g)
    return float(w.pi @ w.hitting_matrix() @ w.pi)


@dataclass
class IndexReport:
    n: int
    m: int
    pi: np.ndarray
    hitting: dict[tuple[int, int], float]
    kappa: dict[tuple[int, int], float]
    kirchhoff: float
    cover_costs: np.ndarray
    uniform_cover: float
    random_target: np.ndarray
    kemeny: float
    mean_hitting: float
    # standard error of ``mean_hitting``: zero, the double sum is evaluated in closed form
    mean_hitting_se: float = 0.0
    pairs_sampled: bool = False
    extra: dict = field(default_factory=dict)

    def rows(self):
        """``(quantity, i, j, value)`` tuples; ``i``/``j`` are ``None`` for scalars."""
        yield "n", None, None, self.n
        yield "m", None, None, self.m
        for u, val in enumerate(self.pi):
            yield "pi", u, None, float(val)
        for (i, j), val in sorted(self.hitting.items()):
            yield "h", i, j, val
        for (i, j), val in sorted(self.kappa.items()):
            yield "kappa", i, j, val
        yield "K", None, None, self.kirchhoff
        for u, val in enumerate(self.cover_costs):
            yield "cc", u, None, float(val)
        yield "ccbar", None, None, self.uniform_cover
        for u, val in enumerate(self.random_target):
            yield "H_j", None, u, float(val)
        yield "H", None, None, self.kemeny
        yield "T", None, None, self.mean_hitting

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "pi": self.pi.tolist(),
            "hitting": [[i, j, v] for (i, j), v in sorted(self.hitting.items())],
            "kappa": [[i, j, v] for (i, j), v in sorted(self.kappa.items())],
            "K": self.kirchhoff,
            "cc": self.cover_costs.tolist(),
            "ccbar": self.uniform_cover,
            "H_j": self.random_target.tolist(),
            "H": self.kemeny,
            "T": self.mean_hitting,
            "T_se": self.mean_hitting_se,
            "pairs_sampled": self.pairs_sampled,
        }


def sample_pairs(n: int, count: int, seed: int) -> list[tuple[int, int]]:
    """``count`` distinct ordered pairs ``i != j`` drawn without replacement."""
    total = n * (n - 1)
    count = min(count, total)
    rng = np.random.default_rng(derive_seed(seed, 0x50A1))
    codes = rng.choice(total, size=count, replace=False)
    out = []
    for c in np.sort(codes).tolist():
        i, r = divmod(c, n - 1)
        out.append((i, r if r < i else r + 1))
    return out


def full_report(g: Graph, pair_budget: int | None = None, *, pairs=None,
                seed: int = 0) -> IndexReport:
    """Every index of a connected graph.

    Scalars and per-vertex vectors are exact.  Pairwise ``h`` and ``kappa``
    cover all ordered pairs when ``pair_budget`` is ``None`` or at least
    ``n(n-1)``, otherwise a seeded uniform sample of that many pairs; explicit
    ``pairs`` override both.
    """
    w = WalkPotentials(g)
    n = g.n
    sampled = False
    if pairs is None:
        if pair_budget is None or pair_budget >= n * (n - 1):
            pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        else:
            pairs = sample_pairs(n, pair_budget, seed)
            sampled = True
    hitting = {}
    kappa = {}
    for i, j in pairs:
        g._check_vertex(i)
        g._check_vertex(j)
        hitting[(i, j)] = w.hitting(i, j)
        a, b = min(i, j), max(i, j)
        kappa[(a, b)] = 2.0 * g.m * w.resistance(a, b)
    return IndexReport(
        n=n, m=g.m, pi=w.pi, hitting=hitting, kappa=kappa, kirchhoff=w.kirchhoff,
        cover_costs=w.cover_costs(), uniform_cover=w.uniform_cover,
        random_target=w.random_targets(), kemeny=w.kemeny, mean_hitting=w.mean_hitting,
        pairs_sampled=sampled,
    )
