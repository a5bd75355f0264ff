"""Pure-Python BFS kernels.

Same contract as the compiled module ``interdict._core``; used as the
fallback when the extension is unavailable (or when INTERDICT_PURE=1).
Arrays come in as numpy but are walked as plain lists, which is much
faster than per-element numpy indexing in CPython.
"""

from collections import deque

import numpy as np

BACKEND = "pure"


def hop_distances(n, rev_indptr, rev_src, rev_eid, da_idx, blocked):
    """Hop distance of every node to ``da_idx`` ignoring blocked edges.

    rev_indptr/rev_src/rev_eid describe incoming edges in CSR form:
    for node v, slots rev_indptr[v]:rev_indptr[v+1] hold (source node,
    edge id) of each edge into v. Returns int32 array, -1 = unreachable.
    """
    indptr = rev_indptr.tolist()
    src = rev_src.tolist()
    eid = rev_eid.tolist()
    blk = blocked.tolist()
    dist = [-1] * n
    dist[da_idx] = 0
    queue = deque([da_idx])
    while queue:
        v = queue.popleft()
        dv = dist[v]
        for slot in range(indptr[v], indptr[v + 1]):
            if blk[eid[slot]]:
                continue
            u = src[slot]
            if dist[u] < 0:
                dist[u] = dv + 1
                queue.append(u)
    return np.asarray(dist, dtype=np.int32)


def blocked_rate(n, rev_indptr, rev_src, rev_eid, da_idx, blocked, entry_idx, ftable):
    """Mean of ftable[dist(e)] over entry nodes; unreachable entries add 0.

    ftable[k] is the success value of a k-hop path, k <= n-1. Fused
    BFS + averaging: this is the hot call of the subset/candidate loops.
    """
    if len(entry_idx) == 0:
        return 0.0
    dist = hop_distances(n, rev_indptr, rev_src, rev_eid, da_idx, blocked)
    total = 0.0
    for e in entry_idx.tolist():
        d = dist[e]
        if d >= 0:
            total += ftable[d]
    return total / len(entry_idx)
