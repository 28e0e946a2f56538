# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Semantics match ``_pure.py`` bit for bit."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int8_t
from libcpp.vector cimport vector

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double SCALE = 1.0 / 9007199254740992.0  # 2**-53

cdef enum:
    NEVER_REACHED = 0
    INCLUDED = 1
    CLASHED = 2


cdef inline uint64_t _finalize(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


def gnp_edges(int64_t n, double p, key):
    cdef uint64_t k = <uint64_t>(int(key) & 0xFFFFFFFFFFFFFFFF)
    cdef vector[int64_t] us
    cdef vector[int64_t] vs
    cdef int64_t u, v
    cdef uint64_t idx = 0
    cdef uint64_t z
    if p > 0.0:
        with nogil:
            for u in range(n):
                for v in range(u + 1, n):
                    idx += 1
                    z = _finalize(k + idx * GOLDEN)
                    if <double>(z >> 11) * SCALE < p:
                        us.push_back(u)
                        vs.push_back(v)
    cdef cnp.ndarray[int64_t, ndim=1] ua = np.empty(us.size(), dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] va = np.empty(vs.size(), dtype=np.int64)
    cdef size_t t
    for t in range(us.size()):
        ua[t] = us[t]
        va[t] = vs[t]
    return ua, va


def bfs_distances(const int64_t[::1] indptr, const int64_t[::1] indices,
                  int64_t source, int64_t max_depth=-1):
    cdef int64_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[int64_t, ndim=1] dist_arr = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] dist = dist_arr
    cdef vector[int64_t] frontier, nxt
    cdef int64_t depth = 0, w, x, t
    cdef size_t a
    dist[source] = 0
    frontier.push_back(source)
    with nogil:
        while frontier.size() > 0 and depth != max_depth:
            depth += 1
            nxt.clear()
            for a in range(frontier.size()):
                w = frontier[a]
                for t in range(indptr[w], indptr[w + 1]):
                    x = indices[t]
                    if dist[x] < 0:
                        dist[x] = depth
                        nxt.push_back(x)
            frontier.swap(nxt)
    return dist_arr


def mbfs(const int64_t[::1] indptr, const int64_t[::1] indices, roots,
         bint remove_clashes=True):
    cdef int64_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[int8_t, ndim=1] status_arr = np.zeros(n, dtype=np.int8)
    cdef cnp.ndarray[int64_t, ndim=1] rnd_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] parent_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] pcount_arr = np.zeros(n, dtype=np.int64)
    cdef int8_t[::1] status = status_arr
    cdef int64_t[::1] rnd = rnd_arr
    cdef int64_t[::1] parent = parent_arr
    cdef int64_t[::1] pcount = pcount_arr
    cdef vector[int64_t] live, nxt, kept
    cdef int64_t neutral = n, level = 0, num_levels = 1, w, x, t, r
    cdef size_t a
    for r in roots:
        status[r] = INCLUDED
        rnd[r] = 0
        live.push_back(r)
        neutral -= 1
    with nogil:
        while neutral > 0:
            nxt.clear()
            for a in range(live.size()):
                w = live[a]
                for t in range(indptr[w], indptr[w + 1]):
                    x = indices[t]
                    if rnd[x] < 0:
                        rnd[x] = level + 1
                        status[x] = INCLUDED
                        parent[x] = w
                        pcount[x] = 1
                        nxt.push_back(x)
                    elif rnd[x] == level + 1:
                        pcount[x] += 1
                        if w < parent[x]:
                            parent[x] = w
            neutral -= <int64_t>nxt.size()
            if remove_clashes:
                kept.clear()
                for a in range(nxt.size()):
                    x = nxt[a]
                    if pcount[x] > 1:
                        status[x] = CLASHED
                        parent[x] = -1
                    else:
                        kept.push_back(x)
                nxt.swap(kept)
            level += 1
            num_levels += 1
            live.swap(nxt)
            if live.size() == 0:
                break
    return status_arr, rnd_arr, parent_arr, pcount_arr, num_levels
