"""Condensed graph: splitting nodes + da, simple paths as featured edges.

Each maximal simple path (every intermediate node has one out-edge) is
walked once, starting from splitting-node successors and then from
entry nodes, and becomes a featured condensed edge. Interior nodes are
claimed by the first walk that crosses them, so every out-degree-1
node belongs to exactly one recorded path even where chains merge; a
later walk still follows the chain to its condensed terminal for its
own features, it just records nothing for the shared stretch.

Feature layout (fixed order, consumed by the learned heuristic):
  node: security level, in degree, out degree, #entries reaching it,
        distance to da unblocked, distance to da with every blockable
        edge blocked (inf -> 2n), entry flag
  edge: first node id, path length, #blockable edges on it, security
        level of the head of the blockable edge closest to da (-1 if
        none), #entries on the path (terminal excluded), direction
        flag (0 = outgoing view at the first node, 1 = incoming view
        at the terminal)
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CyclicGraphError
from .graph import (INF, AttackGraph, security_levels, shortest_distances,
                    splitting_nodes)


@dataclass(frozen=True)
class CondEdge:
    start: int                     # first node of the underlying path
    terminal: int                  # condensed node the walk ends at
    path_edges: tuple[int, ...]    # original edge ids, walk order
    claimed: tuple[int, ...]       # interior nodes this walk recorded
    start_condensed: bool


@dataclass(frozen=True)
class CondensedGraph:
    nodes: tuple[int, ...]
    node_features: dict[int, list[float]]
    edges: tuple[CondEdge, ...]
    route_order: dict[int, tuple[int, ...]]
    edge_features: dict[int, list[float]]  # keyed by position in edges

    def to_dict(self) -> dict:
        records = []
        for pos, ce in enumerate(self.edges):
            feats = self.edge_features[pos]
            if ce.start_condensed:
                records.append({"from": ce.start, "to": ce.terminal,
                                "features": feats + [0],
                                "path_edges": list(ce.path_edges)})
            records.append({"from": ce.start if ce.start_condensed else -1,
                            "to": ce.terminal,
                            "features": feats + [1],
                            "path_edges": list(ce.path_edges)})
        return {
            "nodes": [{"id": v, "features": self.node_features[v]}
                      for v in self.nodes],
            "edges": records,
            "route_order": {str(k): list(v)
                            for k, v in self.route_order.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _levels_for_features(graph: AttackGraph) -> dict[int, int]:
    """Security levels, with a distance-rank stand-in on cyclic graphs."""
    try:
        return security_levels(graph)
    except CyclicGraphError:
        dist = shortest_distances(graph, frozenset())
        finite = sorted({d for d in dist.values() if d != INF}, reverse=True)
        rank = {d: r for r, d in enumerate(finite)}
        worst = 0  # unreachable nodes sit at the lowest level
        return {v: (worst if dist[v] == INF else rank[dist[v]])
                for v in graph.node_ids}


def _entry_reach_counts(graph: AttackGraph) -> dict[int, int]:
    counts = {v: 0 for v in graph.node_ids}
    for e in graph.entries:
        seen = {e}
        stack = [e]
        while stack:
            u = stack.pop()
            counts[u] += 1
            for dst, _ in graph.out_adj[graph.index_of(u)]:
                if dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
    return counts


def condense(graph: AttackGraph) -> CondensedGraph:
    splits = splitting_nodes(graph)
    cond_set = set(splits) | {graph.da}
    levels = _levels_for_features(graph)
    entry_set = set(graph.entries)

    claimed: set[int] = set()
    edges: list[CondEdge] = []

    def walk(first: int, eid0: int, condensed_start: bool):
        path = [eid0]
        newly = []
        cur = graph.edges[eid0].dst
        seen = {first}
        while cur not in cond_set:
            if cur in seen:
                return  # out-degree-1 cycle, no condensed terminal
            seen.add(cur)
            if cur not in claimed:
                claimed.add(cur)
                newly.append(cur)
            out = graph.out_adj[graph.index_of(cur)]
            if not out:
                return  # dead end off da (unpreprocessed input)
            path.append(out[0][1])
            cur = graph.edges[out[0][1]].dst
        edges.append(CondEdge(first, cur, tuple(path), tuple(newly),
                              condensed_start))

    for u in splits:
        for succ in graph.successors(u):
            eid = next(e for d, e in graph.out_adj[graph.index_of(u)]
                       if d == succ)
            walk(u, eid, True)
    for e in sorted(entry_set):
        if e in cond_set or e in claimed:
            continue
        out = graph.out_adj[graph.index_of(e)]
        if not out:
            continue
        claimed.add(e)
        walk(e, out[0][1], False)

    dist_clear = shortest_distances(graph, frozenset())
    dist_all = shortest_distances(graph, frozenset(graph.blockable_edges))
    reach = _entry_reach_counts(graph)
    sentinel = 2 * graph.n

    nodes = tuple(sorted(cond_set))
    node_features = {}
    for v in nodes:
        node_features[v] = [
            levels[v],
            sum(1 for e in graph.edges if e.dst == v),
            graph.out_degree(v),
            reach[v],
            sentinel if dist_clear[v] == INF else dist_clear[v],
            sentinel if dist_all[v] == INF else dist_all[v],
            1 if v in entry_set else 0,
        ]

    edge_features = {}
    for pos, ce in enumerate(edges):
        blockable = [eid for eid in ce.path_edges
                     if graph.edges[eid].blockable]
        closest_level = (levels[graph.edges[blockable[-1]].dst]
                         if blockable else -1)
        path_nodes = [ce.start] + [graph.edges[eid].dst
                                   for eid in ce.path_edges[:-1]]
        edge_features[pos] = [
            ce.start,
            len(ce.path_edges),
            len(blockable),
            closest_level,
            sum(1 for v in path_nodes if v in entry_set),
            # direction flag appended per view in to_dict()
        ]

    route_order = {u: graph.successors(u) for u in splits}
    return CondensedGraph(nodes, node_features, tuple(edges), route_order,
                          edge_features)
