"""Bracketing ``paths_2(i, j, l)``: the largest number of ``i``-``j`` paths of
length at most ``l`` that are pairwise vertex-disjoint on
``V* = V minus (B_1(i) union B_1(j))``.

The lower end is an explicit path family routed through the pruned search
trees; the upper ends are a max-flow bound and ``min(gamma_2(i), gamma_2(j))``
(the latter only valid when ``d(i, j) >= 4``).  Tiny graphs get an exact value
by enumeration plus set packing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import OracleRefused, ParameterError, PreconditionError
from .graph import Graph, bfs_distances, neighborhood
from .mbfs import PrunedSets, StrongKPathWitness

BRUTE_N_LIMIT = 12
BRUTE_PATH_LIMIT = 100_000
INNER_PATH_LIMIT = 1_000_000


@dataclass
class Paths2Bracket:
    i: int
    j: int
    l: int | None
    lower: int
    paths: list[tuple[int, ...]]
    upper_menger: int
    upper_gamma2: int
    gamma2_valid: bool
    exact: int | None = None
    # V* empty: every distinct path qualifies
    degenerate: bool = False
    notes: list[str] = field(default_factory=list)

    def consistent(self) -> bool:
        uppers = [self.upper_menger]
        if self.gamma2_valid:
            uppers.append(self.upper_gamma2)
        lo = self.lower
        if self.exact is not None:
            if self.exact < lo:
                return False
            lo = self.exact
        return lo <= min(uppers)


def ball_union(g: Graph, i: int, j: int) -> np.ndarray:
    """Boolean mask of ``B_1(i) union B_1(j)``."""
    mask = np.zeros(g.n, dtype=bool)
    for c in (i, j):
        mask[c] = True
        mask[g.neighbors(c)] = True
    return mask


def _matched_pairs(witness: StrongKPathWitness, pruned: PrunedSets) -> list[tuple[int, int]]:
    u, v = pruned.roots
    xs, ys = pruned.psi2[u], pruned.psi2[v]
    return list(zip(sorted(xs), sorted(ys)))


def _tree_path_up(trace, leaf: int, top: int) -> list[int]:
    out = [leaf]
    while out[-1] != top:
        par = int(trace.parent[out[-1]])
        if par < 0:
            raise PreconditionError(f"{leaf} does not descend from {top}")
        out.append(par)
    return out


def paths2_construct(g: Graph, witness: StrongKPathWitness,
                     pruned: PrunedSets) -> list[tuple[int, ...]]:
    """``min(psi_2(u), psi_2(v))`` paths of length ``2k+5`` through matched pairs.

    ``Psi_2(u)`` and ``Psi_2(v)`` are matched in sorted order; the pair ``(x, y)``
    yields ``u, a, x, ..., x_k, y_k, ..., y, b, v`` where ``a``, ``b`` are the
    ``Psi_1`` parents and ``x_k y_k`` is the witness bridge.
    """
    if not witness.ok:
        raise PreconditionError("no strong k-path witness")
    u, v = pruned.roots
    if not pruned.psi2[u] or not pruned.psi2[v]:
        return []
    trace = pruned.trace
    par1 = pruned.psi1_parent
    out = []
    for x, y in _matched_pairs(witness, pruned):
        xt, yt = witness.bridges[(x, y)]
        down = _tree_path_up(trace, xt, x)[::-1]
        up = _tree_path_up(trace, yt, y)
        out.append((u, par1[x], *down, *up, par1[y], v))
    problems = validate_paths(g, u, v, out, 2 * witness.k + 5, exact_length=True)
    if problems:
        raise PreconditionError("constructed paths invalid: " + "; ".join(problems))
    return out


def validate_paths(g: Graph, i: int, j: int, paths, l: int | None, *,
                   exact_length: bool = False) -> list[str]:
    """Problems found in a path family (empty when valid)."""
    problems = []
    outside = ~ball_union(g, i, j)
    seen: dict[int, int] = {}
    for t, path in enumerate(paths):
        if path[0] != i or path[-1] != j:
            problems.append(f"path {t} has endpoints {path[0]},{path[-1]}")
        if len(set(path)) != len(path):
            problems.append(f"path {t} repeats a vertex")
        for a, b in zip(path, path[1:]):
            if not g.has_edge(a, b):
                problems.append(f"path {t} uses non-edge ({a},{b})")
        length = len(path) - 1
        if l is not None and (length != l if exact_length else length > l):
            problems.append(f"path {t} has length {length}")
        for x in path:
            if outside[x]:
                if x in seen and seen[x] != t:
                    problems.append(f"paths {seen[x]} and {t} share {x}")
                seen[x] = t
    return problems


def _simple_paths(adj, i: int, j: int, l: int | None, allowed=None,
                  limit: int = INNER_PATH_LIMIT):
    """All simple ``i``-``j`` paths of length at most ``l`` (within ``allowed``)."""
    out = []
    stack = [i]
    on = {i}

    def rec(x):
        if x == j:
            out.append(tuple(stack))
            if len(out) > limit:
                raise OracleRefused(f"more than {limit} simple paths")
            return
        if l is not None and len(stack) - 1 >= l:
            return
        for y in adj[x]:
            if y in on or (allowed is not None and not allowed[y]):
                continue
            stack.append(y)
            on.add(y)
            rec(y)
            on.discard(y)
            stack.pop()

    rec(i)
    return out


def paths2_maxflow_upper(g: Graph, i: int, j: int, l: int | None = None) -> int:
    """Upper bound on ``paths_2(i, j, l)``.

    Paths inside ``B = B_1(i) union B_1(j)`` avoid ``V*`` and are counted one by
    one (with the length cap ``l`` if given).  Every other path enters ``V*``;
    such paths are disjoint there, so their number is at most the maximum flow
    in a network where ``V*`` vertices have capacity 1 and ``B`` vertices appear
    twice, once before the first ``V*`` vertex and once after it.
    """
    g._check_vertex(i)
    g._check_vertex(j)
    if i == j:
        raise ParameterError("need distinct endpoints")
    inb = ball_union(g, i, j)
    inner = len(_simple_paths(g.adjacency, i, j, l, allowed=inb))

    n = g.n
    b_idx = np.flatnonzero(inb)
    s_idx = np.flatnonzero(~inb)
    if s_idx.size == 0:
        return inner
    ids = {}
    nxt = 0
    for b in b_idx.tolist():
        ids[(b, 0)] = nxt
        ids[(b, 1)] = nxt + 1
        nxt += 2
    for s in s_idx.tolist():
        ids[(s, "in")] = nxt
        ids[(s, "out")] = nxt + 1
        nxt += 2
    big = n + 5
    rows, cols, caps = [], [], []

    def arc(a, b, c):
        rows.append(a)
        cols.append(b)
        caps.append(c)

    for s in s_idx.tolist():
        arc(ids[(s, "in")], ids[(s, "out")], 1)
    for a, nbrs in enumerate(g.adjacency):
        for c in nbrs:
            if inb[a] and inb[c]:
                arc(ids[(a, 0)], ids[(c, 0)], big)
                arc(ids[(a, 1)], ids[(c, 1)], big)
            elif inb[a]:
                arc(ids[(a, 0)], ids[(c, "in")], big)
                arc(ids[(a, 1)], ids[(c, "in")], big)
            elif inb[c]:
                arc(ids[(a, "out")], ids[(c, 1)], big)
            else:
                arc(ids[(a, "out")], ids[(c, "in")], big)
    mat = sp.csr_matrix((np.asarray(caps, dtype=np.int32), (rows, cols)), shape=(nxt, nxt))
    flow = csgraph.maximum_flow(mat, ids[(i, 0)], ids[(j, 1)])
    return inner + int(flow.flow_value)


def _max_packing(sets: list[int]) -> int:
    """Largest number of pairwise disjoint bitmasks among ``sets``."""
    sets = sorted(set(sets))
    by_low: dict[int, list[int]] = {}
    universe = 0
    for s in sets:
        by_low.setdefault(s & -s, []).append(s)
        universe |= s
    memo: dict[int, int] = {}

    def best(mask: int) -> int:
        if mask == 0:
            return 0
        if mask in memo:
            return memo[mask]
        low = mask & -mask
        res = best(mask & ~low)
        for s in by_low.get(low, ()):
            if s & mask == s:
                res = max(res, 1 + best(mask & ~s))
        memo[mask] = res
        return res

    return best(universe)


def paths2_exact_bruteforce(g: Graph, i: int, j: int, l: int) -> int:
    """Exact ``paths_2(i, j, l)`` by enumeration, for ``n <= 12``.

    Paths avoiding ``V*`` never conflict and all count; the rest are packed
    by their ``V*`` vertex sets.
    """
    if g.n > BRUTE_N_LIMIT:
        raise OracleRefused(f"brute force limited to n <= {BRUTE_N_LIMIT}")
    if i == j:
        raise ParameterError("need distinct endpoints")
    if l < 0:
        raise ParameterError("length cap must be non-negative")
    paths = _simple_paths(g.adjacency, i, j, l, limit=BRUTE_PATH_LIMIT)
    outside = ~ball_union(g, i, j)
    free = 0
    masks = []
    for path in paths:
        mask = 0
        for x in path:
            if outside[x]:
                mask |= 1 << x
        if mask == 0:
            free += 1
        else:
            masks.append(mask)
    return free + _max_packing(masks)


def gamma2_upper(g: Graph, i: int, j: int) -> tuple[int, bool]:
    """``(min(gamma_2(i), gamma_2(j)), d(i, j) >= 4)``."""
    gi = neighborhood(g, i, 2).size
    gj = neighborhood(g, j, 2).size
    dist = int(bfs_distances(g, i, 3)[j])
    return min(gi, gj), dist < 0


def paths2_bracket(g: Graph, i: int, j: int, l: int | None, *,
                   witness: StrongKPathWitness | None = None,
                   pruned: PrunedSets | None = None,
                   exact: bool = False) -> Paths2Bracket:
    """Assemble the lower and upper ends (and optionally the exact value).

    Without a usable witness the lower end falls back to a single shortest
    path when it fits under ``l``.
    """
    paths: list[tuple[int, ...]] = []
    notes = []
    if witness is not None and pruned is not None and witness.ok and not witness.vacuous:
        if tuple(pruned.roots) == (i, j):
            paths = paths2_construct(g, witness, pruned)
            if l is None:
                l = 2 * witness.k + 5
        else:
            notes.append("witness roots differ from the pair")
    if not paths:
        dist = bfs_distances(g, i)
        if dist[j] >= 0 and (l is None or dist[j] <= l):
            paths = [_shortest_path(g, i, j, dist)]
            notes.append("lower end from a single shortest path")
    upper = paths2_maxflow_upper(g, i, j, l)
    g2, flag = gamma2_upper(g, i, j)
    degenerate = not np.any(~ball_union(g, i, j))
    br = Paths2Bracket(i, j, l, len(paths), paths, upper, g2, flag, None, degenerate, notes)
    if exact:
        if l is None:
            raise ParameterError("exact value needs a length cap")
        br.exact = paths2_exact_bruteforce(g, i, j, l)
    return br


def _shortest_path(g: Graph, i: int, j: int, dist_from_i: np.ndarray) -> tuple[int, ...]:
    out = [j]
    while out[-1] != i:
        x = out[-1]
        out.append(next(y for y in g.adjacency[x] if dist_from_i[y] == dist_from_i[x] - 1))
    return tuple(out[::-1])
