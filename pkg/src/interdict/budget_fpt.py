"""Exact branching solver over (edges of a shortest path) x (drop entry).

At each step, take the smallest remaining entry and a deterministic
shortest path from it: either some edge of that path is blocked (one
branch per blockable path edge, budget - 1) or the entry's current
distance is final and it leaves consideration. Leaf evaluations are
counted against the closed-form combination bound, which is exact for
the unpruned recursion on DAGs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from . import kernels
from .graph import (AttackGraph, RateEvaluator, SuccessFunction,
                    max_attack_path_length)


@dataclass
class BranchStats:
    combinations_explored: int = 0
    bound: int = 0


def combination_bound(l: int, b: int, s: int) -> int:
    """l**b * C(b+s-1, b): leaf evaluations of the unpruned recursion."""
    if l < 1 or b < 0 or s < 1:
        raise ValueError("need l >= 1, b >= 0, s >= 1")
    return l ** b * comb(b + s - 1, b)


def _shortest_path_edges(graph: AttackGraph, dist_idx: list[int],
                         src_idx: int, mask) -> list[int]:
    """Edge ids of a shortest unblocked src->da path, smallest-id ties."""
    path = []
    cur = src_idx
    while dist_idx[cur] > 0:
        for dst, eid in graph.out_adj[cur]:  # sorted by dst id
            if mask[eid]:
                continue
            d = graph.index_of(dst)
            if dist_idx[d] >= 0 and dist_idx[d] == dist_idx[cur] - 1:
                path.append(eid)
                cur = d
                break
        else:
            raise AssertionError("broken shortest-path invariant")
    return path


def budget_fpt(graph: AttackGraph, budget: int,
               f: SuccessFunction = SuccessFunction(),
               prune: bool = True
               ) -> tuple[frozenset[int], float, BranchStats]:
    """Optimal block set for small l, b, s.

    prune=False disables the running-best cutoff; the reported optimum
    and witness are identical either way (the cutoff is strict), only
    the explored-leaves counter differs.
    """
    ev = RateEvaluator(graph, f)
    indptr, srcarr, eids = graph._rev_csr
    da_idx = graph.index_of(graph.da)
    ftable = f.table(max(graph.n, 1))
    mask = graph.blocked_mask(())
    s_total = len(graph.entries)
    stats = BranchStats()
    stats.bound = combination_bound(max(1, max_attack_path_length(graph)),
                                    budget, max(1, s_total))
    if s_total == 0:
        return frozenset(), 0.0, stats

    entry_ids = list(graph.entries)
    best: list = [float("inf"), ()]  # rate, sorted blocked tuple

    def leaf_value(remaining: list[int]) -> float:
        dist = kernels.hop_distances(graph.n, indptr, srcarr, eids,
                                     da_idx, mask)
        total = 0.0
        for e in remaining:
            d = dist[graph.index_of(e)]
            if d >= 0:
                total += ftable[d]
        return total / s_total

    def rec(remaining: list[int], b: int, acc: float, blocked: list[int]):
        if prune and acc > best[0]:
            return
        if b == 0:
            stats.combinations_explored += 1
            value = acc + leaf_value(remaining)
            key = tuple(sorted(blocked))
            if value < best[0] or (value == best[0] and key < best[1]):
                best[0] = value
                best[1] = key
            return
        if not remaining:
            if acc < best[0] or (acc == best[0]
                                 and tuple(sorted(blocked)) < best[1]):
                best[0] = acc
                best[1] = tuple(sorted(blocked))
            return

        s1 = remaining[0]
        rest = remaining[1:]
        dist = kernels.hop_distances(graph.n, indptr, srcarr, eids,
                                     da_idx, mask)
        d1 = dist[graph.index_of(s1)]
        if d1 < 0:
            rec(rest, b, acc, blocked)
            return
        # drop-entry branch: its distance is frozen at the current value
        rec(rest, b, acc + ftable[d1] / s_total, blocked)
        path = _shortest_path_edges(graph, dist.tolist(),
                                    graph.index_of(s1), mask)
        for eid in path:  # nearest-to-entry first
            if not graph.edges[eid].blockable:
                continue
            mask[eid] = 1
            blocked.append(eid)
            rec(remaining, b - 1, acc, blocked)
            blocked.pop()
            mask[eid] = 0

    rec(entry_ids, budget, 0.0, [])
    witness = frozenset(best[1])
    final = ev.rate(graph.blocked_mask(witness))
    return witness, final, stats
