"""Pure Python / numpy implementations of the hot kernels.

These mirror ``_core.pyx`` exactly and are used when the compiled module is
unavailable (or when ``WALKLAB_PURE=1`` is set).
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# statuses shared with the compiled kernel
NEVER_REACHED = 0
INCLUDED = 1
CLASHED = 2

_CHUNK = 1 << 20


def splitmix64(x: int) -> int:
    """One SplitMix64 step: advance ``x`` by the golden gamma and finalize."""
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def _finalize_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def _row_base(u: np.ndarray | int, n: int):
    # index of edge {u, u+1}
    return u * n - (u * (u + 1)) // 2


def gnp_edges(n: int, p: float, key: int) -> tuple[np.ndarray, np.ndarray]:
    """Edges ``(u, v)``, ``u < v``, whose counter draw falls below ``p``.

    Edge ``{u, v}`` has index ``u*n - u*(u+1)/2 + (v-u-1)`` and its uniform is
    ``(finalize(key + (index+1)*GOLDEN) >> 11) * 2**-53``.
    """
    total = n * (n - 1) // 2
    if total == 0 or p <= 0.0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy()
    rows = np.arange(n, dtype=np.int64)
    bases = _row_base(rows, n)
    key64 = np.uint64(key & MASK64)
    gold = np.uint64(GOLDEN)
    scale = 2.0 ** -53
    us, vs = [], []
    with np.errstate(over="ignore"):
        for start in range(0, total, _CHUNK):
            stop = min(start + _CHUNK, total)
            idx = np.arange(start, stop, dtype=np.uint64)
            z = _finalize_array(key64 + (idx + np.uint64(1)) * gold)
            keep = (z >> np.uint64(11)).astype(np.float64) * scale < p
            sel = np.arange(start, stop, dtype=np.int64)[keep]
            if sel.size == 0:
                continue
            u = np.searchsorted(bases, sel, side="right") - 1
            v = sel - bases[u] + u + 1
            us.append(u)
            vs.append(v)
    if not us:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy()
    return np.concatenate(us), np.concatenate(vs)


def bfs_distances(indptr: np.ndarray, indices: np.ndarray, source: int,
                  max_depth: int = -1) -> np.ndarray:
    """Hop distances from ``source``; ``-1`` for unreached (or beyond ``max_depth``)."""
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = [source]
    depth = 0
    ip = indptr.tolist()
    nb = indices.tolist()
    d = dist.tolist()
    while frontier and depth != max_depth:
        depth += 1
        nxt = []
        for w in frontier:
            for t in range(ip[w], ip[w + 1]):
                x = nb[t]
                if d[x] < 0:
                    d[x] = depth
                    nxt.append(x)
        frontier = nxt
    return np.asarray(d, dtype=np.int64)


def mbfs(indptr: np.ndarray, indices: np.ndarray, roots: np.ndarray,
         remove_clashes: bool = True):
    """Run the two-root clash-removing search.

    Returns ``(status, round_, parent, parent_count, num_levels)``:

    * ``round_[w]`` is the level of an included vertex, the round in which a
      clashed vertex was removed, and ``-1`` for never-reached vertices;
    * ``parent[w]`` is the unique live neighbour in the previous level (the
      smallest one when clashes are kept), ``-1`` for roots and non-included;
    * ``parent_count[w]`` is the number of live neighbours in the discovery round.
    """
    n = indptr.shape[0] - 1
    ip = indptr.tolist()
    nb = indices.tolist()
    status = [NEVER_REACHED] * n
    rnd = [-1] * n
    parent = [-1] * n
    pcount = [0] * n
    neutral = n
    live = []
    for r in roots.tolist():
        status[r] = INCLUDED
        rnd[r] = 0
        live.append(r)
        neutral -= 1
    level = 0
    num_levels = 1
    while neutral > 0:
        nxt = []
        for w in live:
            for t in range(ip[w], ip[w + 1]):
                x = nb[t]
                if rnd[x] < 0:
                    rnd[x] = level + 1
                    status[x] = INCLUDED
                    parent[x] = w
                    pcount[x] = 1
                    nxt.append(x)
                elif rnd[x] == level + 1:
                    pcount[x] += 1
                    if w < parent[x]:
                        parent[x] = w
        neutral -= len(nxt)
        if remove_clashes:
            kept = []
            for x in nxt:
                if pcount[x] > 1:
                    status[x] = CLASHED
                    parent[x] = -1
                else:
                    kept.append(x)
            nxt = kept
        level += 1
        num_levels += 1
        live = nxt
        if not live:
            break
    return (np.asarray(status, dtype=np.int8), np.asarray(rnd, dtype=np.int64),
            np.asarray(parent, dtype=np.int64), np.asarray(pcount, dtype=np.int64),
            num_levels)
