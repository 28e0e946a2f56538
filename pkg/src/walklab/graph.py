"""Immutable simple graphs, seeded G(n,p) sampling and neighbourhood queries.

Sampling is driven by a counter-based generator: potential edge ``{u, v}``
(``u < v``) has index ``u*n - u*(u+1)/2 + (v-u-1)`` and is present iff its
SplitMix64 draw under the key ``splitmix64(seed)`` falls below ``p``.  A
sample is therefore a pure function of ``(n, p, seed)`` and does not depend on
iteration order or on which kernel backend is active.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from . import kernels
from .errors import ParameterError, SamplingExhausted, VertexError

MASK64 = (1 << 64) - 1
INF = math.inf

DEFAULT_MAX_ATTEMPTS = 1000


def derive_seed(seed: int, *tags: int) -> int:
    """Derive a 64-bit child seed from ``seed`` and a sequence of integer tags."""
    s = kernels.splitmix64(int(seed) & MASK64)
    for t in tags:
        s = kernels.splitmix64(s ^ (int(t) & MASK64))
    return s


def edge_index(u: int, v: int, n: int) -> int:
    """Canonical index of the potential edge ``{u, v}`` among the C(n,2)."""
    if u > v:
        u, v = v, u
    return u * n - u * (u + 1) // 2 + (v - u - 1)


class Graph:
    """A simple undirected graph on vertices ``0..n-1``.

    Stored in CSR form with sorted neighbour lists; the arrays are read-only,
    so instances can be shared freely between threads and processes.
    """

    __slots__ = ("n", "indptr", "indices", "_adj", "_laplacian")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        indices = np.ascontiguousarray(indices, dtype=np.int64)
        indptr.setflags(write=False)
        indices.setflags(write=False)
        self.indptr = indptr
        self.indices = indices
        self._adj = None
        self._laplacian = None

    # construction -----------------------------------------------------

    @classmethod
    def from_arrays(cls, n: int, us: np.ndarray, vs: np.ndarray, *,
                    validate: bool = True) -> "Graph":
        """Build from parallel endpoint arrays, one entry per undirected edge."""
        n = int(n)
        if n < 0:
            raise ParameterError("n must be non-negative")
        us = np.asarray(us, dtype=np.int64).ravel()
        vs = np.asarray(vs, dtype=np.int64).ravel()
        if us.shape != vs.shape:
            raise ParameterError("endpoint arrays differ in length")
        if validate and us.size:
            if us.min() < 0 or vs.min() < 0 or us.max() >= n or vs.max() >= n:
                raise VertexError("edge endpoint outside 0..n-1")
            if np.any(us == vs):
                raise ParameterError("self-loops are not allowed")
            lo = np.minimum(us, vs)
            hi = np.maximum(us, vs)
            keys = lo * n + hi
            if np.unique(keys).size != keys.size:
                raise ParameterError("duplicate edges are not allowed")
        rows = np.concatenate([us, vs])
        cols = np.concatenate([vs, us])
        order = np.lexsort((cols, rows))
        indices = cols[order]
        counts = np.bincount(rows, minlength=n) if n else np.zeros(0, dtype=np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n, indptr, indices)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls.from_arrays(n, pairs[:, 0], pairs[:, 1])

    @classmethod
    def complete(cls, n: int) -> "Graph":
        us, vs = np.triu_indices(n, 1)
        return cls.from_arrays(n, us, vs, validate=False)

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, leaves: int) -> "Graph":
        """Star with centre 0 and leaves ``1..leaves``."""
        return cls.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])

    # queries ----------------------------------------------------------

    @property
    def m(self) -> int:
        return int(self.indices.size // 2)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        self._check_vertex(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @property
    def adjacency(self) -> list[list[int]]:
        """Sorted neighbour lists as plain Python lists (cached)."""
        if self._adj is None:
            ip = self.indptr.tolist()
            nb = self.indices.tolist()
            self._adj = [nb[ip[v]:ip[v + 1]] for v in range(self.n)]
        return self._adj

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        t = np.searchsorted(nb, v)
        return bool(t < nb.size and nb[t] == v)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if v > u:
                    yield u, v

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        return rows[keep], self.indices[keep]

    def without_edge(self, u: int, v: int) -> "Graph":
        if not self.has_edge(u, v):
            raise ParameterError(f"edge ({u}, {v}) not present")
        us, vs = self.edge_arrays()
        a, b = min(u, v), max(u, v)
        keep = ~((us == a) & (vs == b))
        return Graph.from_arrays(self.n, us[keep], vs[keep], validate=False)

    def laplacian(self) -> sp.csr_matrix:
        """Combinatorial Laplacian ``D - A`` as a CSR matrix (cached)."""
        if self._laplacian is None:
            n = self.n
            adj = sp.csr_matrix(
                (np.ones(self.indices.size), self.indices, self.indptr), shape=(n, n))
            self._laplacian = (sp.diags(self.degrees.astype(float)) - adj).tocsr()
        return self._laplacian

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise VertexError(f"vertex {v} outside 0..{self.n - 1}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self) -> int:
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class GnpSample:
    graph: Graph
    n: int
    p: float
    seed: int
    attempts: int
    # seed that produced ``graph`` (differs from ``seed`` after rejections)
    draw_seed: int


@dataclass(frozen=True)
class NeighborhoodView:
    center: int
    radius: int
    gamma_k: frozenset[int]
    ball: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.gamma_k)


def sample_gnp(n: int, p: float, seed: int) -> Graph:
    """Draw G(n,p) from the counter-based generator keyed by ``seed``."""
    if n < 1:
        raise ParameterError("n must be at least 1")
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ParameterError(f"edge probability {p} outside [0, 1]")
    key = kernels.splitmix64(int(seed) & MASK64)
    us, vs = kernels.gnp_edges(int(n), float(p), key)
    return Graph.from_arrays(n, us, vs, validate=False)


def connected_components(g: Graph) -> np.ndarray:
    """Component label per vertex (labels ordered by smallest member)."""
    _, labels = csgraph.connected_components(
        sp.csr_matrix((np.ones(g.indices.size), g.indices, g.indptr), shape=(g.n, g.n)),
        directed=False)
    return labels


def is_connected(g: Graph) -> bool:
    """True iff a breadth-first search from vertex 0 reaches every vertex."""
    if g.n <= 1:
        return True
    return bool(np.all(kernels.bfs_distances(g.indptr, g.indices, 0) >= 0))


def sample_connected_gnp(n: int, p: float, seed: int,
                         max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> GnpSample:
    """Rejection-sample G(n,p) conditioned on connectivity.

    Attempt 0 uses ``seed`` itself, attempt ``a > 0`` uses ``derive_seed(seed, a)``.
    """
    if max_attempts < 1:
        raise ParameterError("max_attempts must be at least 1")
    for a in range(max_attempts):
        s = int(seed) & MASK64 if a == 0 else derive_seed(seed, a)
        g = sample_gnp(n, p, s)
        if is_connected(g):
            return GnpSample(g, n, p, int(seed), a + 1, s)
    raise SamplingExhausted(max_attempts)


def bfs_distances(g: Graph, source: int, max_depth: int = -1) -> np.ndarray:
    g._check_vertex(source)
    return kernels.bfs_distances(g.indptr, g.indices, int(source), int(max_depth))


def neighborhood(g: Graph, i: int, k: int) -> NeighborhoodView:
    """Sphere ``Gamma_k(i)`` and ball ``B_k(i)`` around ``i``."""
    g._check_vertex(i)
    if k < 0:
        raise ParameterError("radius must be non-negative")
    dist = bfs_distances(g, i, k)
    ball = np.flatnonzero(dist >= 0)
    sphere = np.flatnonzero(dist == k)
    return NeighborhoodView(i, k, frozenset(sphere.tolist()), frozenset(ball.tolist()))


def distance(g: Graph, i: int, j: int) -> int | float:
    """Hop distance, or ``INF`` when ``i`` and ``j`` lie in different components."""
    g._check_vertex(j)
    d = int(bfs_distances(g, i)[j])
    return INF if d < 0 else d
