# cython: language_level=3
"""Compiled BFS kernels (hot inner loop of every solver).

Contract mirrors interdict._pykernels; see that module for docs.
"""

import numpy as np

cimport cython

BACKEND = "compiled"


@cython.boundscheck(False)
@cython.wraparound(False)
def hop_distances(int n,
                  int[::1] rev_indptr,
                  int[::1] rev_src,
                  int[::1] rev_eid,
                  int da_idx,
                  unsigned char[::1] blocked):
    out = np.full(n, -1, dtype=np.int32)
    cdef int[::1] dist = out
    cdef int[::1] queue = np.empty(n, dtype=np.int32)
    cdef int head = 0, tail = 0
    cdef int v, u, dv, slot

    dist[da_idx] = 0
    queue[tail] = da_idx
    tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v]
        for slot in range(rev_indptr[v], rev_indptr[v + 1]):
            if blocked[rev_eid[slot]]:
                continue
            u = rev_src[slot]
            if dist[u] < 0:
                dist[u] = dv + 1
                queue[tail] = u
                tail += 1
    return out


@cython.boundscheck(False)
@cython.wraparound(False)
def blocked_rate(int n,
                 int[::1] rev_indptr,
                 int[::1] rev_src,
                 int[::1] rev_eid,
                 int da_idx,
                 unsigned char[::1] blocked,
                 int[::1] entry_idx,
                 double[::1] ftable):
    cdef int ns = entry_idx.shape[0]
    if ns == 0:
        return 0.0

    cdef int[::1] dist = np.full(n, -1, dtype=np.int32)
    cdef int[::1] queue = np.empty(n, dtype=np.int32)
    cdef int head = 0, tail = 0
    cdef int v, u, dv, slot, i, d
    cdef double total = 0.0

    dist[da_idx] = 0
    queue[tail] = da_idx
    tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v]
        for slot in range(rev_indptr[v], rev_indptr[v + 1]):
            if blocked[rev_eid[slot]]:
                continue
            u = rev_src[slot]
            if dist[u] < 0:
                dist[u] = dv + 1
                queue[tail] = u
                tail += 1
    for i in range(ns):
        d = dist[entry_idx[i]]
        if d >= 0:
            total += ftable[d]
    return total / ns
