"""Greedy baseline and the exact-tree greedy subroutine.

The baseline blocks, for b rounds, the single edge whose removal most
reduces the expected success rate (full re-evaluation per candidate;
the graphs this targets make that cheap). On exact trees this is
optimal: blocks in different branches are independent, and an edge
dominated by one nearer the destination is never preferred.
"""

from __future__ import annotations

import heapq
import math

from .errors import NotATreeError
from .graph import AttackGraph, RateEvaluator, SuccessFunction, evaluate

INF = math.inf


def greedy(graph: AttackGraph, budget: int,
           f: SuccessFunction = SuccessFunction(),
           spend_full_budget: bool = True) -> tuple[frozenset[int], float]:
    """b rounds of single-best-edge blocking, ties to the smallest id.

    With spend_full_budget (the default) leftover budget is spent on
    zero-benefit edges, which is what a budget-must-be-used policy does
    in practice; turn it off to stop at the first round with no strict
    improvement.
    """
    ev = RateEvaluator(graph, f)
    mask = graph.blocked_mask(())
    blocked: list[int] = []
    rate = ev.rate(mask)
    remaining = sorted(graph.blockable_edges)
    for _ in range(budget):
        if not remaining:
            break
        best_eid, best_rate = None, None
        for eid in remaining:
            mask[eid] = 1
            r = ev.rate(mask)
            mask[eid] = 0
            if best_rate is None or r < best_rate:
                best_eid, best_rate = eid, r
        if best_rate >= rate and not spend_full_budget:
            break
        mask[best_eid] = 1
        blocked.append(best_eid)
        remaining.remove(best_eid)
        rate = best_rate
    return frozenset(blocked), rate


def _rational_out(graph: AttackGraph) -> dict[int, tuple[int, int]]:
    """node id -> (successor id, edge id); raises unless out-degrees <= 1."""
    nxt = {}
    for nid in graph.node_ids:
        out = graph.out_adj[graph.index_of(nid)]
        if len(out) > 1:
            raise NotATreeError(f"node {nid} has {len(out)} out-edges")
        if out:
            nxt[nid] = out[0]
    return nxt


def frontier_edges(graph: AttackGraph) -> list[int]:
    """Blockable edges with no blockable edge between them and da.

    Defined on exact trees (every node at most one out-edge): walk each
    node's unique path, the frontier edge of a path is the last
    blockable one before da.
    """
    nxt = _rational_out(graph)
    frontier: set[int] = set()
    for nid in graph.node_ids:
        cur = nid
        last_blockable = None
        seen = set()
        while cur != graph.da and cur in nxt and cur not in seen:
            seen.add(cur)
            dst, eid = nxt[cur]
            if graph.edges[eid].blockable:
                last_blockable = eid
            cur = dst
        if cur == graph.da and last_blockable is not None:
            frontier.add(last_blockable)
    return sorted(frontier)


def tree_greedy(graph: AttackGraph, budget: int,
                f: SuccessFunction = SuccessFunction()
                ) -> tuple[frozenset[int], float]:
    """Optimal blocking on an exact tree via frontier-edge benefits.

    benefit(e) = sum of f(dist(s_i))/s over entries severed by e; the
    severed sets are pairwise disjoint (paths are unique), so blocking
    the top-b benefits is optimal. Ties go to the smaller edge id.
    """
    nxt = _rational_out(graph)
    entries = graph.entries
    s = len(entries)
    if s == 0 or budget <= 0:
        return frozenset(), evaluate(graph, frozenset(), f).expected_success_rate

    benefit: dict[int, float] = {}
    for entry in entries:
        cur = entry
        hops = 0
        last_blockable = None
        seen = set()
        while cur != graph.da and cur in nxt and cur not in seen:
            seen.add(cur)
            dst, eid = nxt[cur]
            if graph.edges[eid].blockable:
                last_blockable = eid
            cur = dst
            hops += 1
        if cur == graph.da and last_blockable is not None:
            benefit[last_blockable] = benefit.get(last_blockable, 0.0) \
                + f(hops) / s

    top = heapq.nsmallest(budget, benefit.items(),
                          key=lambda kv: (-kv[1], kv[0]))
    blocks = frozenset(eid for eid, _ in top)
    return blocks, evaluate(graph, blocks, f).expected_success_rate
