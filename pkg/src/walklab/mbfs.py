"""Two-root breadth-first search with clash removal, pruned neighbourhoods and
the strong k-path property.

A search from roots ``{u, v}`` grows levels ``I_0 = {u, v}, I_1, I_2, ...``.
Every neutral vertex adjacent to the current level is discovered; a discovered
vertex with two or more neighbours in the current level (a *clash*) is killed
instead of joining the next level.  Surviving vertices therefore have exactly
one parent, and the levels form a forest rooted at ``u`` and ``v``.

Clash-free neighbourhoods ``gamma_star(x, i)`` are taken in that forest: the
depth-``i`` descendants of ``x``.  For ``i <= 1`` this coincides with the set of
level-``(k+i)`` vertices at graph distance ``i`` from ``x`` (``x`` in ``I_k``);
for deeper ``i`` the distance-based set can pick up vertices from other
branches through killed vertices, which would break the tree structure that the
flow and path constructions rely on.  :func:`gamma_star_by_distance` gives the
distance-based set for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal

import numpy as np

from . import kernels
from .errors import ParameterError, VertexError
from .graph import Graph, bfs_distances

STATUS_NAMES = {
    kernels.INCLUDED: "dead-included",
    kernels.CLASHED: "dead-clashed",
    kernels.NEVER_REACHED: "never-reached",
}


class MbfsTrace:
    """Immutable record of one run of the clash-removing search."""

    def __init__(self, graph: Graph, roots: tuple[int, ...], status: np.ndarray,
                 rounds: np.ndarray, parent: np.ndarray, parent_count: np.ndarray,
                 num_levels: int, remove_clashes: bool = True):
        self.graph = graph
        self.roots = roots
        self.status = status
        self.rounds = rounds
        self.parent = parent
        self.parent_count = parent_count
        self.num_levels = int(num_levels)
        self.remove_clashes = remove_clashes
        for arr in (status, rounds, parent, parent_count):
            arr.setflags(write=False)

    @cached_property
    def levels(self) -> tuple[tuple[int, ...], ...]:
        inc = np.flatnonzero(self.status == kernels.INCLUDED)
        lv = self.rounds[inc]
        out = []
        for i in range(self.num_levels):
            out.append(tuple(inc[lv == i].tolist()))
        return tuple(out)

    @cached_property
    def neutral_snapshots(self) -> tuple[frozenset[int], ...]:
        """``S_i``: vertices still neutral while ``I_i`` was the live set."""
        r = self.rounds
        out = []
        for i in range(self.num_levels):
            out.append(frozenset(np.flatnonzero((r < 0) | (r > i)).tolist()))
        return tuple(out)

    @cached_property
    def children(self) -> dict[int, tuple[int, ...]]:
        kids: dict[int, list[int]] = {}
        inc = np.flatnonzero((self.status == kernels.INCLUDED) & (self.parent >= 0))
        for w, par in zip(inc.tolist(), self.parent[inc].tolist()):
            kids.setdefault(par, []).append(w)
        return {k: tuple(sorted(v)) for k, v in kids.items()}

    @cached_property
    def edge_sets(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """``E_j``: edges joining ``I_j`` to ``I_{j+1}`` as ``(parent, child)``."""
        out = []
        for j in range(self.num_levels - 1):
            es = [(int(self.parent[w]), w) for w in self.levels[j + 1]]
            if not self.remove_clashes:
                # with clashes kept a vertex may have several parents
                lvl = set(self.levels[j])
                es = [(a, w) for w in self.levels[j + 1]
                      for a in self.graph.adjacency[w] if a in lvl]
            out.append(tuple(sorted(es)))
        return tuple(out)

    def level_of(self, x: int) -> int:
        if not 0 <= x < self.graph.n or self.status[x] != kernels.INCLUDED:
            raise VertexError(f"vertex {x} is not in any level of the trace")
        return int(self.rounds[x])

    def status_of(self, x: int) -> str:
        return STATUS_NAMES[int(self.status[x])]

    def children_of(self, x: int) -> tuple[int, ...]:
        return self.children.get(x, ())


def run_mbfs(g: Graph, roots: Iterable[int], *, remove_clashes: bool = True) -> MbfsTrace:
    """Run the search from ``roots`` (two distinct vertices in normal use).

    ``remove_clashes=False`` skips the clash step; with a single root this is
    plain breadth-first search.
    """
    roots = tuple(int(r) for r in roots)
    if not roots:
        raise ParameterError("at least one root is required")
    if len(set(roots)) != len(roots):
        raise ParameterError("roots must be distinct")
    for r in roots:
        g._check_vertex(r)
    status, rounds, parent, pcount, num = kernels.mbfs(
        g.indptr, g.indices, np.asarray(roots, dtype=np.int64), bool(remove_clashes))
    return MbfsTrace(g, roots, status, rounds, parent, pcount, num, remove_clashes)


def gamma_star(trace: MbfsTrace, x: int, i: int) -> frozenset[int]:
    """Clash-free ``i``-th neighbourhood of ``x``: its depth-``i`` descendants."""
    trace.level_of(x)
    if i < 0:
        raise ParameterError("i must be non-negative")
    frontier = [x]
    for _ in range(i):
        frontier = [c for w in frontier for c in trace.children_of(w)]
        if not frontier:
            break
    return frozenset(frontier)


def gamma_star_by_distance(trace: MbfsTrace, x: int, i: int) -> frozenset[int]:
    """Level-``(k+i)`` vertices at graph distance exactly ``i`` from ``x`` in ``I_k``."""
    k = trace.level_of(x)
    if k + i >= trace.num_levels:
        return frozenset()
    dist = bfs_distances(trace.graph, x, i)
    return frozenset(w for w in trace.levels[k + i] if dist[w] == i)


@dataclass(frozen=True)
class SkView:
    x: int
    s_k_of_x: frozenset[int]


def s_k_of(trace: MbfsTrace, x: int) -> SkView:
    """Neutral vertices at ``x``'s level not adjacent to any other live vertex."""
    k = trace.level_of(x)
    adj = trace.graph.adjacency
    blocked = {w for z in trace.levels[k] if z != x for w in adj[z]}
    return SkView(x, frozenset(trace.neutral_snapshots[k] - blocked))


@dataclass(frozen=True)
class PrunedSets:
    trace: MbfsTrace
    d: int
    phi1: dict[int, tuple[int, ...]]
    psi1: dict[int, tuple[int, ...]]
    psi2: dict[int, tuple[int, ...]]

    @property
    def roots(self) -> tuple[int, int]:
        return self.trace.roots  # type: ignore[return-value]

    def gamma_star(self, x: int, i: int) -> frozenset[int]:
        return gamma_star(self.trace, x, i)

    def phi1_count(self, x: int) -> int:
        return len(self.phi1.get(x, ()))

    def psi1_count(self, w: int) -> int:
        return len(self.psi1[w])

    def psi2_count(self, w: int) -> int:
        return len(self.psi2[w])

    @cached_property
    def psi1_parent(self) -> dict[int, int]:
        """Maps each vertex of ``Psi_2`` to its parent in ``Psi_1``."""
        return {x: a for w in self.roots for a in self.psi1[w] for x in self.phi1[a]}


def prune(trace: MbfsTrace, d: int = 1) -> PrunedSets:
    """Degree-pruned neighbourhoods ``Phi_1``, ``Psi_1`` and ``Psi_2``.

    ``Phi_1(x)`` keeps the children of ``x`` in ``I_1`` having more than ``d``
    children; ``Psi_1(w)`` keeps the children of root ``w`` with non-empty
    ``Phi_1``; ``Psi_2(w)`` is the union of ``Phi_1`` over ``Psi_1(w)``.
    """
    if d < 1:
        raise ParameterError("pruning threshold d must be at least 1")
    if len(trace.roots) != 2:
        raise ParameterError("pruning needs a two-root trace")
    ch = trace.children_of
    level1 = trace.levels[1] if trace.num_levels > 1 else ()
    phi1 = {x: tuple(y for y in ch(x) if len(ch(y)) > d) for x in level1}
    psi1 = {w: tuple(x for x in ch(w) if phi1[x]) for w in trace.roots}
    psi2 = {w: tuple(sorted(y for x in psi1[w] for y in phi1[x])) for w in trace.roots}
    return PrunedSets(trace, d, phi1, psi1, psi2)


def b_event_holds(pruned: PrunedSets) -> tuple[bool, bool, bool]:
    """``(B_u, B_v, B_u and B_v)``: each root has non-empty ``Psi_1``."""
    u, v = pruned.roots
    bu = bool(pruned.psi1[u])
    bv = bool(pruned.psi1[v])
    return bu, bv, bu and bv


@dataclass(frozen=True)
class StrongKPathWitness:
    k: int
    bridges: dict[tuple[int, int], tuple[int, int]]
    trees: dict[int, tuple[tuple[int, int], ...]]
    vacuous: bool = False
    ok: bool = field(default=True, init=False)


@dataclass(frozen=True)
class StrongKPathFailure:
    k: int
    pair: tuple[int, int]
    reason: Literal["empty_gamma_x", "empty_gamma_y", "no_bridge"]
    ok: bool = field(default=False, init=False)


def _descendants_by_depth(trace: MbfsTrace, x: int, k: int) -> list[list[int]]:
    layers = [[x]]
    for _ in range(k):
        layers.append([c for w in layers[-1] for c in trace.children_of(w)])
    return layers


def tree_edges(trace: MbfsTrace, x: int, k: int) -> tuple[tuple[int, int], ...]:
    """Edges ``(parent, child)`` of the depth-``k`` subtree ``T_k(x)``."""
    layers = _descendants_by_depth(trace, x, k)
    return tuple((int(trace.parent[c]), c) for layer in layers[1:] for c in layer)


def check_strong_k_path(g: Graph, trace: MbfsTrace, pruned: PrunedSets,
                        k: int) -> StrongKPathWitness | StrongKPathFailure:
    """Test the strong k-path property for the trace roots.

    On success every pair ``(x, y)`` in ``Psi_2(u) x Psi_2(v)`` is bridged by the
    lexicographically smallest edge between ``Gamma*_k(x)`` and ``Gamma*_k(y)``.
    On failure the first offending pair (lexicographic) is reported.
    """
    if k < 0:
        raise ParameterError("k must be non-negative")
    u, v = pruned.roots
    xs, ys = pruned.psi2[u], pruned.psi2[v]
    if not xs or not ys:
        return StrongKPathWitness(k, {}, {}, vacuous=True)

    leaves = {w: _descendants_by_depth(trace, w, k)[-1] for w in (*xs, *ys)}
    owner = {}
    for y in ys:
        for z in leaves[y]:
            owner[z] = y
    adj = g.adjacency
    bridged: dict[int, dict[int, tuple[int, int]]] = {}
    for x in xs:
        found: dict[int, tuple[int, int]] = {}
        for xt in sorted(leaves[x]):
            for yt in adj[xt]:
                y = owner.get(yt)
                if y is not None and y not in found:
                    found[y] = (xt, yt)
        bridged[x] = found

    for x in xs:
        for y in ys:
            if not leaves[x]:
                return StrongKPathFailure(k, (x, y), "empty_gamma_x")
            if not leaves[y]:
                return StrongKPathFailure(k, (x, y), "empty_gamma_y")
            if y not in bridged[x]:
                return StrongKPathFailure(k, (x, y), "no_bridge")

    bridges = {(x, y): bridged[x][y] for x in xs for y in ys}
    trees = {w: tree_edges(trace, w, k) for w in (*xs, *ys)}
    return StrongKPathWitness(k, bridges, trees)


def recommended_k(n: int, p: float, regime: Literal["sparse", "dense"]) -> int:
    """Depth at which the strong k-path property is expected to hold.

    sparse: ``ceil(log(4n/225) / (2 log np)) + 1``;
    dense:  ``ceil(log(400n/81) / (2 log np))``; the ceiling is clamped at 0.
    """
    np_ = n * p
    if np_ <= 1:
        raise ParameterError("recommended k needs np > 1")
    denom = 2.0 * math.log(np_)
    if regime == "sparse":
        return max(0, math.ceil(math.log(4.0 * n / 225.0) / denom)) + 1
    if regime == "dense":
        return max(0, math.ceil(math.log(400.0 * n / 81.0) / denom))
    raise ParameterError(f"unknown regime {regime!r}")


def scan_k_limit(n: int, p: float) -> int:
    np_ = n * p
    if np_ <= 1:
        return 2
    return math.ceil(math.log(n) / (2.0 * math.log(np_))) + 2


def scan_k(g: Graph, trace: MbfsTrace, pruned: PrunedSets, p: float):
    """Smallest ``k`` in ``0..scan_k_limit`` with the property, and its result.

    Returns ``(None, failure_at_limit)`` when no depth succeeds.
    """
    result = None
    for k in range(scan_k_limit(g.n, p) + 1):
        result = check_strong_k_path(g, trace, pruned, k)
        if result.ok:
            return k, result
    return None, result


def trace_to_dict(trace: MbfsTrace) -> dict:
    return {
        "roots": list(trace.roots),
        "levels": [list(lv) for lv in trace.levels],
        "neutral": [sorted(s) for s in trace.neutral_snapshots],
        "edge_sets": [[list(e) for e in es] for es in trace.edge_sets],
        "dead_clashed": np.flatnonzero(trace.status == kernels.CLASHED).tolist(),
        "never_reached": np.flatnonzero(trace.status == kernels.NEVER_REACHED).tolist(),
    }


def pruned_to_dict(pruned: PrunedSets) -> dict:
    return {
        "d": pruned.d,
        "phi1": {str(x): list(s) for x, s in sorted(pruned.phi1.items())},
        "psi1": {str(w): list(s) for w, s in pruned.psi1.items()},
        "psi2": {str(w): list(s) for w, s in pruned.psi2.items()},
    }


def result_to_dict(result: StrongKPathWitness | StrongKPathFailure | None) -> dict | None:
    if result is None:
        return None
    if result.ok:
        return {
            "ok": True,
            "k": result.k,
            "vacuous": result.vacuous,
            "bridges": [[x, y, xt, yt] for (x, y), (xt, yt) in sorted(result.bridges.items())],
            "trees": {str(x): [list(e) for e in es] for x, es in sorted(result.trees.items())},
        }
    return {"ok": False, "k": result.k, "pair": list(result.pair), "reason": result.reason}


@dataclass(frozen=True)
class WitnessInstance:
    roots: tuple[int, int]
    d: int
    k: int
    trace: MbfsTrace
    pruned: PrunedSets
    witness: StrongKPathWitness


def search_witness(g: Graph, pairs: Iterable[tuple[int, int]], p: float, *,
                   d_values: Iterable[int] = range(1, 8)) -> WitnessInstance | None:
    """First ``(pair, d)`` with a non-vacuous witness and the B event, scanning k.

    Pairs are tried in the given order and, for each pair, ``d`` in increasing
    order; larger ``d`` only shrinks ``Psi_1``, so a pair is abandoned as soon as
    B fails.
    """
    d_values = tuple(d_values)
    for u, v in pairs:
        trace = run_mbfs(g, (u, v))
        for d in d_values:
            pruned = prune(trace, d)
            if not b_event_holds(pruned)[2]:
                break
            k, res = scan_k(g, trace, pruned, p)
            if k is not None and not res.vacuous:
                return WitnessInstance((u, v), d, k, trace, pruned, res)
    return None
