"""Synthetic instance generators.

Graphs come out as trees oriented toward the destination plus h extra
"security exception" edges, which is the structure real directory
deployments exhibit. All generators are deterministic per seed:
regenerating with equal parameters yields byte-identical JSON.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass

from .errors import InfeasibleError
from .graph import AttackGraph


@dataclass(frozen=True)
class GenParams:
    n: int
    h: int = 0
    max_depth: int = 4
    s: int = 1
    p_b: float = 0.2
    dag: bool = True
    seed: int = 0
    uniform_entries: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not 0 <= self.s <= self.n - 1:
            raise ValueError("s must be in [0, n-1]")
        if not 0.0 <= self.p_b <= 1.0:
            raise ValueError("p_b must be in [0, 1]")
        if self.h > self.n * (self.n - 1) // 2 - (self.n - 1):
            raise ValueError("h exceeds the simple-graph maximum")


def gen_tree_like(params: GenParams) -> AttackGraph:
    """Random tree toward da (node 0) + h extra edges + entry sampling.

    A spine of length max_depth guarantees the target depth is reached;
    every other node attaches to a uniformly chosen node of depth
    < max_depth. With dag=True extra edges go from strictly deeper to
    strictly shallower nodes, which keeps every node's longest path to
    da equal to its tree depth (so the number of security levels is
    max_depth + 1). With dag=False any non-parallel pair is allowed.
    """
    n, h = params.n, params.h
    if n < params.max_depth + 1:
        raise InfeasibleError(
            f"need at least {params.max_depth + 1} nodes for depth "
            f"{params.max_depth}")
    rng = random.Random(params.seed)

    depth = {0: 0}
    edges: list[tuple[int, int, bool]] = []
    for v in range(1, params.max_depth + 1):
        edges.append((v, v - 1, False))
        depth[v] = v
    shallow = [v for v in range(params.max_depth + 1)
               if depth[v] < params.max_depth]
    for v in range(params.max_depth + 1, n):
        parent = rng.choice(shallow)
        edges.append((v, parent, False))
        depth[v] = depth[parent] + 1
        if depth[v] < params.max_depth:
            shallow.append(v)

    present = {(s, d) for s, d, _ in edges}
    if params.dag:
        shallower = sorted(depth.values())
        avail = sum(bisect.bisect_left(shallower, depth[u])
                    for u in range(1, n)) - (n - 1)
    else:
        avail = (n - 1) * (n - 1) - (n - 1)  # no source rows for da, no tree edges
    if h > avail:
        raise InfeasibleError(f"h={h} exceeds {avail} available extra edges")

    if n <= 1500:
        if params.dag:
            candidates = [(u, v) for u in range(1, n) for v in range(n)
                          if depth[u] > depth[v] and (u, v) not in present]
        else:
            candidates = [(u, v) for u in range(1, n) for v in range(n)
                          if u != v and (u, v) not in present]
        extra = sorted(rng.sample(candidates, h))
    else:
        # too many pairs to materialize at this size: rejection-sample
        chosen: set[tuple[int, int]] = set()
        attempts = 0
        while len(chosen) < h:
            attempts += 1
            if attempts > 1000 * (h + 1):
                raise InfeasibleError("could not place extra edges")
            u = rng.randrange(1, n)
            v = rng.randrange(n)
            if u == v or (u, v) in present or (u, v) in chosen:
                continue
            if params.dag and depth[u] <= depth[v]:
                continue
            chosen.add((u, v))
        extra = sorted(chosen)
    for u, v in extra:
        edges.append((u, v, False))

    if params.uniform_entries:
        pool = list(range(1, n))
    else:
        by_depth: dict[int, list[int]] = {}
        for v, dv in depth.items():
            by_depth.setdefault(dv, []).append(v)
        pool = []
        for dv in sorted(by_depth, reverse=True):
            pool.extend(v for v in sorted(by_depth[dv]) if v != 0)
            if dv <= max(by_depth) - 1 and len(pool) >= params.s:
                break
    entry_set = set(rng.sample(sorted(pool), params.s))

    graph = AttackGraph(
        nodes=[(v, v in entry_set) for v in range(n)],
        edges=edges, da=0)
    return mark_blockable(graph, params.p_b, rng.getrandbits(63))


def mark_blockable(graph: AttackGraph, p_b: float, seed: int) -> AttackGraph:
    """Per-node blockable marking.

    One draw per node with out-edges: a non-splitting node's single
    out-edge becomes blockable with probability p_b; a splitting node
    gets all of its out-edges blockable with probability p_b, else none.
    """
    rng = random.Random(seed)
    flags = [False] * graph.m
    for nid in sorted(graph.node_ids):
        out = graph.out_adj[graph.index_of(nid)]
        if not out:
            continue
        hit = rng.random() < p_b
        for _, eid in out:
            flags[eid] = hit
    return AttackGraph(
        nodes=graph.nodes,
        edges=[(e.src, e.dst, flags[i]) for i, e in enumerate(graph.edges)],
        da=graph.da)


def add_substitutable(graph: AttackGraph, seed: int,
                      prob: float = 0.5) -> AttackGraph:
    """Duplicate the head of selected blockable edges.

    For a chosen blockable edge a->b with a successor c of b, adds b'
    and the parallel route a->b' (blockable) and b'->c, so severing a
    from that direction now takes two blocks. Edges into da heads are
    skipped (no successor to rejoin through). Acyclic in, acyclic out.
    """
    rng = random.Random(seed)
    nodes = list(graph.nodes)
    edges = [(e.src, e.dst, e.blockable) for e in graph.edges]
    next_id = max(graph.node_ids) + 1
    for e in list(graph.edges):
        if not e.blockable:
            continue
        succ = graph.successors(e.dst)
        if not succ:
            continue
        if rng.random() >= prob:
            continue
        c = succ[0]
        onward = next(be for d, be in graph.out_adj[graph.index_of(e.dst)]
                      if d == c)
        nodes.append((next_id, False))
        edges.append((e.src, next_id, True))
        edges.append((next_id, c, graph.edges[onward].blockable))
        next_id += 1
    return AttackGraph(nodes, edges, graph.da)


def add_decoys(graph: AttackGraph, count: int, seed: int) -> AttackGraph:
    """Attach nodes that cannot reach da (pruned away by preprocess).

    Mirrors real exports where most of the directory cannot reach the
    admin: each decoy hangs off a random existing node via one incoming
    edge and has no way forward.
    """
    rng = random.Random(seed)
    nodes = list(graph.nodes)
    edges = [(e.src, e.dst, e.blockable) for e in graph.edges]
    anchors = sorted(graph.node_ids)
    next_id = max(anchors) + 1
    for _ in range(count):
        anchor = rng.choice(anchors)
        nodes.append((next_id, False))
        edges.append((anchor, next_id, False))
        next_id += 1
    return AttackGraph(nodes, edges, graph.da)


def gen_clique_reduction(n_nodes: int,
                         und_edges: list[tuple[int, int]]) -> AttackGraph:
    """Attack graph encoding of an undirected instance.

    One entry per undirected edge; each original node i becomes the
    gadget i_in -> i_out (blockable) -> da; the entry for edge {i, j}
    feeds both i_in and j_in. Every attack path is exactly 3 hops, and
    severing k entries with budget b is possible iff b original nodes
    cover k edges.
    """
    seen = set()
    for i, j in und_edges:
        if i == j or not (0 <= i < n_nodes and 0 <= j < n_nodes):
            raise ValueError(f"bad undirected edge ({i},{j})")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ValueError(f"duplicate undirected edge ({i},{j})")
        seen.add(key)

    def node_in(i: int) -> int:
        return 1 + 2 * i

    def node_out(i: int) -> int:
        return 2 + 2 * i

    nodes = [(0, False)]
    for i in range(n_nodes):
        nodes.append((node_in(i), False))
        nodes.append((node_out(i), False))
    edges: list[tuple[int, int, bool]] = []
    for i in range(n_nodes):
        edges.append((node_in(i), node_out(i), True))
        edges.append((node_out(i), 0, False))
    base = 2 * n_nodes + 1
    for k, (i, j) in enumerate(und_edges):
        nodes.append((base + k, True))
        edges.append((base + k, node_in(i), False))
        edges.append((base + k, node_in(j), False))
    return AttackGraph(nodes, edges, da=0)
