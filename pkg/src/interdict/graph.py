"""Attack-graph data model and the defender objective.

The game: an attacker enters at one of the entry nodes (uniformly at
random) and walks a shortest unblocked path to the single destination
node ``da``. A path of x hops succeeds with probability base**x; no
path means failure. The defender removes blockable edges to minimize
the expected success rate.

AttackGraph is immutable after construction and all operations here are
pure functions, so a shared graph can be used concurrently. Node ids
are arbitrary non-negative ints (the public face); internally nodes are
mapped to dense indices for the CSR arrays handed to the BFS kernels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

from . import kernels
from .errors import CyclicGraphError, PreprocessError

INF = math.inf


class Edge(NamedTuple):
    src: int
    dst: int
    blockable: bool


@dataclass(frozen=True)
class SuccessFunction:
    """f(x) = base**x for a finite x-hop path, f(inf) = 0."""

    base: float = 0.95

    def __call__(self, hops: float) -> float:
        if hops == INF:
            return 0.0
        return self.base ** hops

    def table(self, max_hops: int) -> np.ndarray:
        """ftable[k] = f(k) for k = 0..max_hops, for the kernels."""
        return self.base ** np.arange(max_hops + 1, dtype=np.float64)


@dataclass(frozen=True)
class Evaluation:
    per_entry_distance: dict[int, float]
    expected_success_rate: float


class AttackGraph:
    """Directed graph with entry nodes, one destination, blockable flags.

    Edges are identified by their index in ``edges`` (block sets are
    sets of such indices). Construction only rejects what would make
    the object unusable (duplicate ids, unknown endpoints); semantic
    problems like duplicate edges are reported by validate().
    """

    def __init__(self, nodes: Iterable[tuple[int, bool]],
                 edges: Iterable[tuple[int, int, bool]], da: int):
        self.nodes: tuple[tuple[int, bool], ...] = tuple(
            (int(i), bool(e)) for i, e in nodes)
        self.edges: tuple[Edge, ...] = tuple(
            Edge(int(s), int(d), bool(b)) for s, d, b in edges)
        self.da = int(da)

        self._idx = {}
        for pos, (nid, _) in enumerate(self.nodes):
            if nid in self._idx:
                raise ValueError(f"duplicate node id {nid}")
            self._idx[nid] = pos
        if self.da not in self._idx:
            raise ValueError(f"da {self.da} is not a node")
        for e in self.edges:
            if e.src not in self._idx or e.dst not in self._idx:
                raise ValueError(f"edge {e.src}->{e.dst} has unknown endpoint")

    # -- basic shape ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def node_ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.nodes)

    @cached_property
    def entries(self) -> tuple[int, ...]:
        """Entry node ids, ascending."""
        return tuple(sorted(i for i, is_entry in self.nodes if is_entry))

    @cached_property
    def blockable_edges(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.edges) if e.blockable)

    def index_of(self, node_id: int) -> int:
        return self._idx[node_id]

    def id_of(self, idx: int) -> int:
        return self.nodes[idx][0]

    # -- adjacency -----------------------------------------------------

    @cached_property
    def out_adj(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per node index: ((dst_id, edge_id), ...) sorted by dst id."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for eid, e in enumerate(self.edges):
            adj[self._idx[e.src]].append((e.dst, eid))
        return tuple(tuple(sorted(a)) for a in adj)

    def successors(self, node_id: int) -> tuple[int, ...]:
        """Distinct successor ids of a node, ascending (the route order)."""
        seen = []
        for dst, _ in self.out_adj[self._idx[node_id]]:
            if not seen or seen[-1] != dst:
                seen.append(dst)
        return tuple(seen)

    def out_degree(self, node_id: int) -> int:
        return len(self.out_adj[self._idx[node_id]])

    @cached_property
    def _rev_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Incoming edges in CSR form (indptr, src_idx, edge_id)."""
        counts = np.zeros(self.n + 1, dtype=np.int32)
        for e in self.edges:
            counts[self._idx[e.dst] + 1] += 1
        indptr = np.cumsum(counts, dtype=np.int32)
        src = np.zeros(self.m, dtype=np.int32)
        eids = np.zeros(self.m, dtype=np.int32)
        cursor = indptr[:-1].copy()
        for eid, e in enumerate(self.edges):
            d = self._idx[e.dst]
            src[cursor[d]] = self._idx[e.src]
            eids[cursor[d]] = eid
            cursor[d] += 1
        return indptr, src, eids

    @cached_property
    def _entry_idx(self) -> np.ndarray:
        return np.asarray(sorted(self._idx[i] for i in self.entries),
                          dtype=np.int32)

    def blocked_mask(self, blocks: Iterable[int]) -> np.ndarray:
        mask = np.zeros(self.m, dtype=np.uint8)
        for eid in blocks:
            mask[eid] = 1
        return mask

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "da": self.da,
            "nodes": [{"id": i, "entry": e} for i, e in self.nodes],
            "edges": [{"src": e.src, "dst": e.dst, "blockable": e.blockable}
                      for e in self.edges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AttackGraph":
        return cls(
            nodes=[(nd["id"], nd["entry"]) for nd in d["nodes"]],
            edges=[(ed["src"], ed["dst"], ed["blockable"]) for ed in d["edges"]],
            da=d["da"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=None, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "AttackGraph":
        return cls.from_dict(json.loads(text))


def load_graph(path) -> AttackGraph:
    with open(path) as fh:
        return AttackGraph.from_dict(json.load(fh))


def save_graph(graph: AttackGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(graph.to_json())
        fh.write("\n")


# ---------------------------------------------------------------------
# Validation and preprocessing
# ---------------------------------------------------------------------

def validate(graph: AttackGraph) -> list[str]:
    """All violated invariants, as messages. Empty list = valid.

    Reports, never raises: callers decide what is fatal.
    """
    errors = []
    for nid, is_entry in graph.nodes:
        if nid < 0:
            errors.append(f"negative node id {nid}")
        if is_entry and nid == graph.da:
            errors.append("da is entry")
    seen_pairs = set()
    for e in graph.edges:
        if e.src == e.dst:
            errors.append(f"self-loop at {e.src}")
        if (e.src, e.dst) in seen_pairs:
            errors.append(f"duplicate edge ({e.src},{e.dst})")
        seen_pairs.add((e.src, e.dst))
    if not graph.entries:
        errors.append("no entry nodes")
    dist = shortest_distances(graph, frozenset())
    stranded = [i for i in graph.node_ids if dist[i] == INF]
    if stranded:
        errors.append(f"{len(stranded)} node(s) cannot reach da: "
                      f"{sorted(stranded)[:10]}")
    return errors


def preprocess(graph: AttackGraph, admin_nodes: set[int]
               ) -> tuple[AttackGraph, dict[int, int]]:
    """Merge admin nodes into one destination and prune dead weight.

    All admin nodes collapse into a single da (the smallest admin id);
    incoming edges are redirected there, duplicates collapse keeping
    blockable=False if any copy was unblockable, and out-edges of the
    merged destination are dropped (the game ends at da). Nodes with no
    directed path to da are removed. Surviving nodes keep their ids;
    the returned mapping sends each surviving original id to its new id
    (admins map to the merged da id, pruned ids are absent).
    """
    if not admin_nodes:
        raise ValueError("admin_nodes must be non-empty")
    unknown = admin_nodes - set(graph.node_ids)
    if unknown:
        raise ValueError(f"unknown admin node(s): {sorted(unknown)}")

    da = min(admin_nodes)
    remap = {i: (da if i in admin_nodes else i) for i in graph.node_ids}

    merged_nodes = []
    for nid, is_entry in graph.nodes:
        if nid in admin_nodes and nid != da:
            continue
        merged_nodes.append((nid, False if nid == da else is_entry))

    merged_edges: list[tuple[int, int, bool]] = []
    edge_pos: dict[tuple[int, int], int] = {}
    for e in graph.edges:
        src, dst = remap[e.src], remap[e.dst]
        if src == da or src == dst:
            continue
        key = (src, dst)
        if key in edge_pos:
            pos = edge_pos[key]
            s, d, b = merged_edges[pos]
            merged_edges[pos] = (s, d, b and e.blockable)
        else:
            edge_pos[key] = len(merged_edges)
            merged_edges.append((src, dst, e.blockable))

    merged = AttackGraph(merged_nodes, merged_edges, da)
    dist = shortest_distances(merged, frozenset())
    alive = {i for i in merged.node_ids if dist[i] < INF}

    nodes = [(i, e) for i, e in merged.nodes if i in alive]
    edges = [(s, d, b) for s, d, b in merged_edges if s in alive and d in alive]
    pruned = AttackGraph(nodes, edges, da)
    if not pruned.entries:
        raise PreprocessError("no entry node can reach da after preprocessing")
    mapping = {old: new for old, new in remap.items() if new in alive}
    return pruned, mapping


# ---------------------------------------------------------------------
# Distances and the objective
# ---------------------------------------------------------------------

def check_blocks(graph: AttackGraph, blocks: Iterable[int]) -> frozenset[int]:
    blocks = frozenset(blocks)
    for eid in blocks:
        if not 0 <= eid < graph.m:
            raise ValueError(f"edge index {eid} out of range")
        if not graph.edges[eid].blockable:
            raise ValueError(f"edge {eid} is not blockable")
    return blocks


def shortest_distances(graph: AttackGraph, blocks: Iterable[int] = frozenset()
                       ) -> dict[int, float]:
    """Hop distance of every node to da on G-B (inf when disconnected)."""
    blocks = check_blocks(graph, blocks)
    indptr, src, eids = graph._rev_csr
    dist = kernels.hop_distances(graph.n, indptr, src, eids,
                                 graph.index_of(graph.da),
                                 graph.blocked_mask(blocks))
    return {graph.id_of(i): (INF if d < 0 else int(d))
            for i, d in enumerate(dist)}


def evaluate(graph: AttackGraph, blocks: Iterable[int] = frozenset(),
             f: SuccessFunction = SuccessFunction()) -> Evaluation:
    """Exact defender objective for a block set."""
    dist = shortest_distances(graph, blocks)
    per_entry = {e: dist[e] for e in graph.entries}
    if not per_entry:
        return Evaluation(per_entry, 0.0)
    rate = sum(f(d) for d in per_entry.values()) / len(per_entry)
    return Evaluation(per_entry, rate)


class RateEvaluator:
    """Reusable fused-kernel evaluator for solver inner loops.

    Skips the per-call validity checks of evaluate(); callers must pass
    masks over genuinely blockable edges.
    """

    def __init__(self, graph: AttackGraph, f: SuccessFunction):
        self.graph = graph
        self._indptr, self._src, self._eids = graph._rev_csr
        self._da = graph.index_of(graph.da)
        self._entries = graph._entry_idx
        self._ftable = f.table(max(graph.n, 1))

    def rate(self, mask: np.ndarray) -> float:
        return kernels.blocked_rate(self.graph.n, self._indptr, self._src,
                                    self._eids, self._da, mask,
                                    self._entries, self._ftable)


# ---------------------------------------------------------------------
# Structure: levels, splitting nodes, parameters
# ---------------------------------------------------------------------

def _topo_order(graph: AttackGraph) -> list[int]:
    """Node indices in topological order; raises on cycles."""
    indeg = [0] * graph.n
    for e in graph.edges:
        indeg[graph.index_of(e.dst)] += 1
    stack = sorted(i for i in range(graph.n) if indeg[i] == 0)
    order = []
    while stack:
        u = stack.pop()
        order.append(u)
        for dst, _ in graph.out_adj[u]:
            d = graph.index_of(dst)
            indeg[d] -= 1
            if indeg[d] == 0:
                stack.append(d)
    if len(order) != graph.n:
        raise CyclicGraphError("graph contains a directed cycle")
    return order


def is_acyclic(graph: AttackGraph) -> bool:
    try:
        _topo_order(graph)
        return True
    except CyclicGraphError:
        return False


def _heights(graph: AttackGraph) -> list[int]:
    """Longest out-path length per node index (0 at sinks). DAG only."""
    order = _topo_order(graph)
    h = [0] * graph.n
    for u in reversed(order):
        best = 0
        for dst, _ in graph.out_adj[u]:
            cand = h[graph.index_of(dst)] + 1
            if cand > best:
                best = cand
        h[u] = best
    return h


def security_levels(graph: AttackGraph) -> dict[int, int]:
    """Rank nodes so every edge goes to a strictly higher level.

    Level = rank of (longest remaining path), deepest nodes first, so
    da sits alone at the top on preprocessed graphs. Raises
    CyclicGraphError on cyclic input.
    """
    h = _heights(graph)
    ranks = {v: r for r, v in enumerate(sorted(set(h), reverse=True))}
    return {graph.id_of(i): ranks[h[i]] for i in range(graph.n)}


def splitting_nodes(graph: AttackGraph) -> list[int]:
    """Nodes with >= 2 out-going edges, ascending by id."""
    return sorted(i for i in graph.node_ids if graph.out_degree(i) >= 2)


def max_out_degree(graph: AttackGraph) -> int:
    return max((graph.out_degree(i) for i in graph.node_ids), default=0)


def feedback_edge_count(graph: AttackGraph) -> int:
    """h = m - n + #components of the underlying undirected graph."""
    parent = list(range(graph.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = graph.n
    for e in graph.edges:
        a, b = find(graph.index_of(e.src)), find(graph.index_of(e.dst))
        if a != b:
            parent[a] = b
            comps -= 1
    return graph.m - graph.n + comps


def max_attack_path_length(graph: AttackGraph) -> int:
    """Exact longest entry-to-da path on DAGs; n-1 on cyclic graphs."""
    try:
        order = _topo_order(graph)
    except CyclicGraphError:
        return graph.n - 1
    reach = shortest_distances(graph, frozenset())
    lp = [-1] * graph.n  # longest path to da; -1 = cannot reach
    lp[graph.index_of(graph.da)] = 0
    for u in reversed(order):
        if graph.id_of(u) == graph.da:
            continue
        best = -1
        for dst, _ in graph.out_adj[u]:
            cand = lp[graph.index_of(dst)]
            if cand >= 0 and cand + 1 > best:
                best = cand + 1
        lp[u] = best
    assert all((lp[graph.index_of(i)] >= 0) == (reach[i] < INF)
               for i in graph.node_ids)
    lengths = [lp[graph.index_of(e)] for e in graph.entries
               if lp[graph.index_of(e)] >= 0]
    return max(lengths, default=0)


def strategy_space_size(graph: AttackGraph) -> int:
    """Product of (out-degree + 1) over splitting nodes."""
    size = 1
    for t in splitting_nodes(graph):
        size *= graph.out_degree(t) + 1
    return size


def graph_stats(graph: AttackGraph) -> dict:
    """The parameter table: n, m, s, l, h, t, d."""
    return {
        "n": graph.n,
        "m": graph.m,
        "s": len(graph.entries),
        "l": max_attack_path_length(graph),
        "h": feedback_edge_count(graph),
        "t": len(splitting_nodes(graph)),
        "d": max_out_degree(graph),
    }
