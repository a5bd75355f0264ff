"""Exact solver enumerating attacker route choices at splitting nodes.

Instead of searching the defender's exponential block-set space, guess
what the attacker does at each splitting node when facing the optimal
defence: one of its simple-path routes, or nothing. For each guess,
derive the defence that makes the guess a best response (protect taken
routes, block strictly-better untaken ones), spend what is left with
the exact-tree greedy, and score the result with the real evaluator.
At least one guess is the true best response to the optimal defence,
so the minimum over guesses is the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .errors import TooLargeError
from .graph import (AttackGraph, SuccessFunction, evaluate, splitting_nodes,
                    strategy_space_size)
from .greedy import tree_greedy

INF = math.inf
NONE_ROUTE = -1

STRATEGY_GUARD = 10_000_000


@dataclass(frozen=True)
class Route:
    """Maximal simple path leaving a splitting node via one successor."""

    edges: tuple[int, ...]          # edge ids in walk order
    endpoint: int | None            # splitting node or da; None = dead end

    def __len__(self) -> int:
        return len(self.edges)


def _walk_route(graph: AttackGraph, start_eid: int,
                split_set: set[int]) -> Route:
    edges = [start_eid]
    cur = graph.edges[start_eid].dst
    seen = {graph.edges[start_eid].src}
    while cur != graph.da and cur not in split_set:
        if cur in seen:
            return Route(tuple(edges), None)  # out-degree-1 cycle
        seen.add(cur)
        out = graph.out_adj[graph.index_of(cur)]
        if not out:
            return Route(tuple(edges), None)  # dead end off da
        _, eid = out[0]
        edges.append(eid)
        cur = graph.edges[eid].dst
    return Route(tuple(edges), cur)


def routes_by_split(graph: AttackGraph) -> dict[int, list[Route]]:
    """Per splitting node, routes in ascending-successor order."""
    splits = splitting_nodes(graph)
    split_set = set(splits)
    table: dict[int, list[Route]] = {}
    for node in splits:
        routes = []
        for succ in graph.successors(node):
            eid = next(e for d, e in graph.out_adj[graph.index_of(node)]
                       if d == succ)
            routes.append(_walk_route(graph, eid, split_set))
        table[node] = routes
    return table


def enumerate_strategies(graph: AttackGraph):
    """All attacker classifications, lexicographic, NONE last per node."""
    size = strategy_space_size(graph)
    if size > STRATEGY_GUARD:
        raise TooLargeError(f"{size} strategies exceeds guard "
                            f"{STRATEGY_GUARD}")
    splits = splitting_nodes(graph)
    per_node = [list(range(len(graph.successors(t)))) + [NONE_ROUTE]
                for t in splits]
    for combo in product(*per_node):
        yield dict(zip(splits, combo))


def eval_strategy(graph: AttackGraph, strategy: dict[int, int], budget: int,
                  f: SuccessFunction = SuccessFunction(),
                  routes: dict[int, list[Route]] | None = None
                  ) -> tuple[bool, frozenset[int], float]:
    """Best defence consistent with an attacker classification.

    Returns (valid, block set, rate); invalid guesses (not enough
    blockable edges, or forced blocks exceeding the budget) come back
    as (False, empty, 1.0). The rate of a valid guess is recomputed by
    evaluate(), never taken from the guess's own bookkeeping.
    """
    if routes is None:
        routes = routes_by_split(graph)
    splits = splitting_nodes(graph)
    if set(strategy) != set(splits):
        raise ValueError("strategy must classify exactly the splitting nodes")
    for node, choice in strategy.items():
        if not (choice == NONE_ROUTE
                or 0 <= choice < len(graph.successors(node))):
            raise ValueError(f"route index {choice} out of range at {node}")

    protected: set[int] = set()
    for node, choice in strategy.items():
        if choice != NONE_ROUTE:
            for eid in routes[node][choice].edges:
                if graph.edges[eid].blockable:
                    protected.add(eid)

    # distances of splitting nodes under the guessed choices
    dist: dict[int, float] = {node: INF for node in splits}
    dist[graph.da] = 0
    for _ in range(len(splits) + 1):
        for node in splits:
            choice = strategy[node]
            if choice == NONE_ROUTE:
                continue
            route = routes[node][choice]
            if route.endpoint is None:
                continue
            cand = len(route) + dist[route.endpoint]
            if cand < dist[node]:
                dist[node] = cand

    forced: list[int] = []
    forced_set: set[int] = set()
    for node in splits:
        for r, route in enumerate(routes[node]):
            if r == strategy[node]:
                continue
            if any(eid in forced_set for eid in route.edges):
                continue  # an earlier forced block already cut it
            end_dist = INF if route.endpoint is None else dist[route.endpoint]
            if len(route) + end_dist >= dist[node]:
                continue  # not strictly better for the attacker
            candidates = [eid for eid in route.edges
                          if graph.edges[eid].blockable
                          and eid not in protected]
            if not candidates:
                return False, frozenset(), 1.0
            eid = candidates[-1]  # closest to da
            forced.append(eid)
            forced_set.add(eid)
    if len(forced) > budget:
        return False, frozenset(), 1.0

    residual, eid_map = _residual_tree(graph, strategy, routes, protected,
                                       forced_set)
    sub_blocks, _ = tree_greedy(residual, budget - len(forced), f)
    blocks = frozenset(forced_set | {eid_map[e] for e in sub_blocks})
    rate = evaluate(graph, blocks, f).expected_success_rate
    return True, blocks, rate


def _residual_tree(graph: AttackGraph, strategy: dict[int, int],
                   routes: dict[int, list[Route]], protected: set[int],
                   forced: set[int]) -> tuple[AttackGraph, dict[int, int]]:
    """Exact tree of rational moves left after protecting and blocking.

    Keeps each node's single rational out-edge (the chosen route at
    splitting nodes, the only edge elsewhere), drops forced-blocked
    edges, and downgrades protected edges to unblockable. Returns the
    tree plus a map from its edge ids back to the original ones.
    """
    rational: list[int] = []
    for nid in graph.node_ids:
        out = graph.out_adj[graph.index_of(nid)]
        if not out:
            continue
        if nid in strategy:
            choice = strategy[nid]
            if choice == NONE_ROUTE:
                continue
            eid = routes[nid][choice].edges[0]
        else:
            eid = out[0][1]
        if eid not in forced:
            rational.append(eid)

    edges = []
    eid_map = {}
    for new_id, eid in enumerate(sorted(rational)):
        e = graph.edges[eid]
        edges.append((e.src, e.dst, e.blockable and eid not in protected))
        eid_map[new_id] = eid
    return AttackGraph(graph.nodes, edges, graph.da), eid_map


def split_fpt(graph: AttackGraph, budget: int,
              f: SuccessFunction = SuccessFunction()
              ) -> tuple[frozenset[int], float, int]:
    """Minimum rate over all valid attacker classifications.

    Exhaustive on purpose: the evaluated count is the instrumentation
    for the 3**h strategy-space bound.
    """
    routes = routes_by_split(graph)
    best_rate = INF
    best_blocks: tuple[int, ...] | None = None
    evaluated = 0
    for strategy in enumerate_strategies(graph):
        evaluated += 1
        valid, blocks, rate = eval_strategy(graph, strategy, budget, f,
                                            routes=routes)
        if not valid:
            continue
        key = tuple(sorted(blocks))
        if rate < best_rate or (rate == best_rate and key < best_blocks):
            best_rate = rate
            best_blocks = key
    assert best_blocks is not None, "no valid strategy found"
    return frozenset(best_blocks), best_rate, evaluated
