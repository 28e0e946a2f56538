"""Effective resistance, unit flows and the resistance bounds.

All edges carry unit conductance.  Exact resistances come from solving
``L x = e_i - e_j`` on the mean-zero subspace: a dense Cholesky solve of
``L + J/n`` for small graphs, Jacobi-preconditioned conjugate gradients
otherwise.  Disconnected pairs get ``math.inf`` rather than an exception so that
Monte Carlo pipelines can record them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Mapping

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import OracleRefused, ParameterError, PreconditionError, SolverError
from .graph import INF, Graph, connected_components, distance
from .mbfs import PrunedSets, StrongKPathWitness

DENSE_LIMIT = 500
CG_TOL = 1e-10

Method = Literal["laplacian-solve", "spanning-tree-oracle", "flow-energy-bound"]


@dataclass(frozen=True)
class ResistanceResult:
    value: float
    method: Method
    residual: float = 0.0
    exact: Fraction | None = None


def pcg(matvec, b: np.ndarray, diag: np.ndarray, *, tol: float = CG_TOL,
        maxiter: int | None = None, project: bool = False) -> tuple[np.ndarray, float, int]:
    """Jacobi-preconditioned conjugate gradients.

    With ``project=True`` the system is the singular Laplacian: the residual is
    kept mean-zero and the returned iterate is projected onto the mean-zero
    subspace.  Returns ``(x, relative_residual, iterations)``.
    """
    n = b.size
    maxiter = 10 * n if maxiter is None else maxiter
    bnorm = float(np.linalg.norm(b))
    x = np.zeros(n)
    if bnorm == 0.0:
        return x, 0.0, 0
    inv_diag = 1.0 / diag
    r = b.copy()
    z = inv_diag * r
    p = z.copy()
    rz = float(r @ z)
    it = 0
    while it < maxiter:
        if np.linalg.norm(r) <= tol * bnorm:
            break
        ap = matvec(p)
        alpha = rz / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        if project:
            r -= r.mean()
        z = inv_diag * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
    if project:
        x -= x.mean()
    res = float(np.linalg.norm(b - matvec(x))) / bnorm
    if res > tol * 10:
        raise SolverError(res, it)
    return x, res, it


class LaplacianSolver:
    """Cached solves against one connected graph's Laplacian."""

    def __init__(self, g: Graph, *, dense_limit: int = DENSE_LIMIT, tol: float = CG_TOL):
        if g.n < 2:
            raise ParameterError("need at least two vertices")
        self.g = g
        self.tol = tol
        self.L = g.laplacian()
        self.deg = g.degrees.astype(float)
        self.dense = g.n <= dense_limit
        self._chol = None
        if self.dense:
            a = self.L.toarray() + 1.0 / g.n
            self._chol = sla.cho_factor(a, lower=True)

    def solve(self, b: np.ndarray) -> tuple[np.ndarray, float]:
        """Mean-zero solution of ``L x = b`` for mean-zero ``b``."""
        if self.dense:
            x = sla.cho_solve(self._chol, b)
            x -= x.mean()
            bnorm = float(np.linalg.norm(b)) or 1.0
            return x, float(np.linalg.norm(self.L @ x - b)) / bnorm
        x, res, _ = pcg(self.L.dot, b, self.deg, tol=self.tol, project=True)
        return x, res

    def resistance(self, i: int, j: int) -> ResistanceResult:
        if i == j:
            return ResistanceResult(0.0, "laplacian-solve", 0.0)
        b = np.zeros(self.g.n)
        b[i], b[j] = 1.0, -1.0
        x, res = self.solve(b)
        return ResistanceResult(float(x[i] - x[j]), "laplacian-solve", res)

    def grounded_solve(self, j: int, b: np.ndarray) -> tuple[np.ndarray, float]:
        """Solve the Laplacian with row/column ``j`` removed; entry ``j`` of the result is 0."""
        n = self.g.n
        keep = np.ones(n, dtype=bool)
        keep[j] = False
        lj = self.L[keep][:, keep]
        bj = b[keep]
        if self.dense:
            xj = sla.solve(lj.toarray(), bj, assume_a="pos")
            res = float(np.linalg.norm(lj @ xj - bj)) / (float(np.linalg.norm(bj)) or 1.0)
        else:
            xj, res, _ = pcg(lj.dot, bj, lj.diagonal(), tol=self.tol)
        x = np.zeros(n)
        x[keep] = xj
        return x, res


def component_view(g: Graph, i: int, j: int):
    """Restrict to the component of ``i``; ``None`` when ``j`` lies elsewhere."""
    labels = connected_components(g)
    if labels[i] != labels[j]:
        return None
    members = np.flatnonzero(labels == labels[i])
    if members.size == g.n:
        return g, i, j
    relabel = np.full(g.n, -1, dtype=np.int64)
    relabel[members] = np.arange(members.size)
    us, vs = g.edge_arrays()
    keep = relabel[us] >= 0
    sub = Graph.from_arrays(members.size, relabel[us[keep]], relabel[vs[keep]], validate=False)
    return sub, int(relabel[i]), int(relabel[j])


def exact_resistance(g: Graph, i: int, j: int, *, tol: float = CG_TOL,
                     dense_limit: int = DENSE_LIMIT) -> ResistanceResult:
    """Effective resistance between ``i`` and ``j`` by a Laplacian solve."""
    g._check_vertex(i)
    g._check_vertex(j)
    if i == j:
        raise ParameterError("resistance needs distinct vertices")
    view = component_view(g, i, j)
    if view is None:
        return ResistanceResult(INF, "laplacian-solve", 0.0)
    sub, a, b = view
    return LaplacianSolver(sub, dense_limit=dense_limit, tol=tol).resistance(a, b)


def _bareiss_det(rows: list[list[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    a = [r[:] for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for s in range(k + 1, n):
                if a[s][k] != 0:
                    a[k], a[s] = a[s], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                a[r][c] = (a[r][c] * a[k][k] - a[r][k] * a[k][c]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


ORACLE_LIMIT = 12


def laplacian_rows(g: Graph) -> list[list[int]]:
    lap = [[0] * g.n for _ in range(g.n)]
    for u, v in g.edges():
        lap[u][v] -= 1
        lap[v][u] -= 1
        lap[u][u] += 1
        lap[v][v] += 1
    return lap


def spanning_tree_count(g: Graph) -> int:
    if g.n <= 1:
        return 1
    lap = laplacian_rows(g)
    return _bareiss_det([row[1:] for row in lap[1:]])


def spanning_tree_resistance_oracle(g: Graph, i: int, j: int) -> ResistanceResult:
    """Exact rational resistance: separating 2-forests over spanning trees.

    ``R(i,j) = det L[-{i,j}] / det L[-{i}]`` with integer Bareiss determinants.
    Refuses graphs above twelve vertices.
    """
    if g.n > ORACLE_LIMIT:
        raise OracleRefused(f"oracle limited to n <= {ORACLE_LIMIT}, got {g.n}")
    if i == j:
        raise ParameterError("resistance needs distinct vertices")
    lap = laplacian_rows(g)
    keep_i = [r for r in range(g.n) if r != i]
    trees = _bareiss_det([[lap[r][c] for c in keep_i] for r in keep_i])
    if trees == 0:
        raise ParameterError("graph is disconnected")
    keep_ij = [r for r in keep_i if r != j]
    forests = _bareiss_det([[lap[r][c] for c in keep_ij] for r in keep_ij])
    frac = Fraction(forests, trees)
    return ResistanceResult(float(frac), "spanning-tree-oracle", 0.0, frac)


# --- flows -----------------------------------------------------------------


@dataclass
class UnitFlow:
    """Edge flow from ``source`` to ``sink``.

    ``values`` maps oriented edges to reals; a flow built here stores each edge
    once as ``(a, b)`` with ``a < b``, and :meth:`net` reads it antisymmetrically.
    """

    source: int
    sink: int
    values: dict[tuple[int, int], float] = field(default_factory=dict)

    def add(self, x: int, y: int, amount: float) -> None:
        if x < y:
            self.values[(x, y)] = self.values.get((x, y), 0.0) + amount
        else:
            self.values[(y, x)] = self.values.get((y, x), 0.0) - amount

    def net(self, x: int, y: int) -> float:
        """Flow along ``x -> y`` read antisymmetrically."""
        fwd = self.values.get((x, y))
        bwd = self.values.get((y, x))
        if fwd is not None and bwd is not None:
            return 0.5 * (fwd - bwd)
        if fwd is not None:
            return fwd
        if bwd is not None:
            return -bwd
        return 0.0

    def undirected(self) -> dict[tuple[int, int], float]:
        """Net flow per undirected edge, oriented from smaller to larger label."""
        out = {}
        for (x, y) in self.values:
            a, b = (x, y) if x < y else (y, x)
            if (a, b) not in out:
                out[(a, b)] = self.net(a, b)
        return out


def flow_energy(flow: UnitFlow) -> float:
    """Dissipated energy with unit conductances: sum of squared edge flows."""
    return math.fsum(t * t for t in flow.undirected().values())


@dataclass(frozen=True)
class FlowReport:
    max_node_violation: float
    worst_vertex: int | None
    strength_error: float
    antisymmetry_violations: tuple[tuple[int, int], ...]
    edges_outside: tuple[tuple[int, int], ...]

    def ok(self, tol: float = 1e-9) -> bool:
        return (self.max_node_violation <= tol and self.strength_error <= tol
                and not self.antisymmetry_violations and not self.edges_outside)


def validate_flow(g: Graph, flow: UnitFlow, *, antisym_tol: float = 1e-12) -> FlowReport:
    """Check the node law, unit strength, antisymmetry and support of a flow."""
    bad_anti = []
    for (x, y), val in flow.values.items():
        if x != y and (y, x) in flow.values and x < y:
            if abs(val + flow.values[(y, x)]) > antisym_tol:
                bad_anti.append((x, y))
    outside = []
    divergence = np.zeros(g.n)
    for (a, b), val in flow.undirected().items():
        if not (0 <= a < g.n and 0 <= b < g.n) or a == b or not g.has_edge(a, b):
            outside.append((a, b))
            continue
        divergence[a] += val
        divergence[b] -= val
    s, t = flow.source, flow.sink
    strength_error = max(abs(divergence[s] - 1.0), abs(divergence[t] + 1.0))
    inner = divergence.copy()
    inner[[s, t]] = 0.0
    worst = int(np.argmax(np.abs(inner))) if g.n else None
    viol = float(abs(inner[worst])) if worst is not None else 0.0
    if viol == 0.0:
        worst = None
    return FlowReport(viol, worst, float(strength_error), tuple(bad_anti), tuple(outside))


def build_lemma_flow(g: Graph, witness: StrongKPathWitness, pruned: PrunedSets) -> UnitFlow:
    """Explicit unit flow between the roots routed through the pruned trees.

    Root ``u`` sends ``1/psi1(u)`` to each vertex of ``Psi_1(u)``; each
    ``a`` there splits its share evenly over ``Phi_1(a)``; each pair
    ``(x, y)`` of second-level vertices is bridged by its witness edge carrying
    the product of the two shares; inside each depth-``k`` tree an edge carries
    the total bridge flow leaving below it.  The ``v`` side mirrors this with
    flow entering ``v``.
    """
    if not witness.ok:
        raise PreconditionError("no strong k-path witness")
    u, v = pruned.roots
    if not (pruned.psi1[u] and pruned.psi1[v]):
        raise PreconditionError("B event fails: a root has empty Psi_1")
    if witness.vacuous:
        raise PreconditionError("witness is vacuous")
    trace = pruned.trace
    flow = UnitFlow(u, v)
    share: dict[int, float] = {}
    for root, sign in ((u, 1.0), (v, -1.0)):
        psi1 = pruned.psi1[root]
        for a in psi1:
            flow.add(root, a, sign / len(psi1))
            phi = pruned.phi1[a]
            for x in phi:
                w = 1.0 / (len(psi1) * len(phi))
                share[x] = w
                flow.add(a, x, sign * w)

    # bridge flow accumulated at each tree vertex (bottom-up)
    through: dict[int, float] = {}
    for (x, y), (xt, yt) in witness.bridges.items():
        amount = share[x] * share[y]
        flow.add(xt, yt, amount)
        through[xt] = through.get(xt, 0.0) + amount
        through[yt] = through.get(yt, 0.0) + amount
    k = witness.k
    for root, sign in ((u, 1.0), (v, -1.0)):
        for x in pruned.psi2[root]:
            layers = [[x]]
            for _ in range(k):
                layers.append([c for w in layers[-1] for c in trace.children_of(w)])
            for depth in range(k, 0, -1):
                for c in layers[depth]:
                    amt = through.get(c, 0.0)
                    par = int(trace.parent[c])
                    through[par] = through.get(par, 0.0) + amt
                    if amt:
                        flow.add(par, c, sign * amt)
    return flow


def resistance_upper_bound_formula(pruned: PrunedSets, k: int) -> float:
    """Closed-form upper bound from the pruned neighbourhood sizes.

    ``1/psi1(u) + 1/psi1(v) + sum_a (k+2)/(psi1(u)^2 phi1(a)) + (same for v)``,
    infinite when either root has empty ``Psi_1`` or some ``Phi_1(a)`` is empty.
    """
    total = []
    for root in pruned.roots:
        psi = pruned.psi1[root]
        if not psi:
            return INF
        if any(not pruned.phi1[a] for a in psi):
            return INF
        s = len(psi)
        total.append(1.0 / s)
        total.extend((k + 2) / (s * s * len(pruned.phi1[a])) for a in psi)
    return math.fsum(total)


def resistance_lower_bound(g: Graph, i: int, j: int) -> float:
    """``1/(deg i + 1) + 1/(deg j + 1)``."""
    if i == j:
        raise ParameterError("bound needs distinct vertices")
    return 1.0 / (g.degree(i) + 1) + 1.0 / (g.degree(j) + 1)


def distance_resistance_bound(g: Graph, i: int, j: int, *, check: bool = False) -> float:
    """Graph distance, an upper bound on resistance (series along a shortest path)."""
    d = distance(g, i, j)
    if check and d != INF and i != j:
        r = exact_resistance(g, i, j).value
        if r > d * (1 + 1e-9):
            raise AssertionError(f"R({i},{j})={r} exceeds distance {d}")
    return float(d)


def laplacian_pinv(g: Graph) -> np.ndarray:
    """Dense Moore-Penrose pseudoinverse of a connected graph's Laplacian.

    Uses ``(L + J/n)^{-1} = L^+ + J/n`` with a Cholesky inverse.
    """
    n = g.n
    a = g.laplacian().toarray()
    a += 1.0 / n
    c, info = lapack.dpotrf(a, lower=1, overwrite_a=1)
    if info != 0:
        raise ParameterError("Laplacian + J/n not positive definite (disconnected graph?)")
    inv, info = lapack.dpotri(c, lower=1, overwrite_c=1)
    if info != 0:
        raise SolverError(float("nan"), 0)
    inv = np.tril(inv) + np.tril(inv, -1).T
    inv -= 1.0 / n
    return inv


def resistance_matrix(g: Graph) -> np.ndarray:
    gam = laplacian_pinv(g)
    dg = np.diag(gam)
    return dg[:, None] + dg[None, :] - 2.0 * gam


def resistance_map(g: Graph) -> Mapping[tuple[int, int], float]:
    r = resistance_matrix(g)
    return {(a, b): float(r[a, b]) for a in range(g.n) for b in range(g.n)}
