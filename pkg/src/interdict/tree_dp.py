"""Tree-decomposition dynamic program for acyclic instances.

Three stages:
  1. eliminate_decompose - vertex elimination in ascending security-level
     order. Bag of v = {v} + its not-yet-eliminated neighbours (with
     fill-in), attached to the bag of the earliest-eliminated member of
     the rest. This always yields a decomposition whose root bag is the
     destination alone and where a vertex's own bag contains all of its
     out-neighbours, so its distance is decidable the moment it appears.
  2. nicify - insert auxiliary clone bags so every budget decision is
     one-dimensional: a bag either spends on its introduced vertex or
     splits the remainder between at most two children.
  3. dp_solve - memoized recursion over (bag, context distances,
     remaining budget). Spending z on vertex x always blocks the z
     shortest of its blockable out-options.

Distance labels live in {0..l, INF}; a computed distance beyond the
maximum entry-to-da path length cannot matter to the objective and
collapses to INF.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .errors import CyclicGraphError
from .graph import (INF, AttackGraph, SuccessFunction, evaluate,
                    max_attack_path_length, security_levels,
                    shortest_distances)


@dataclass
class TreeDecomposition:
    """Bags as ordered vertex tuples; parent links point toward the root."""

    bags: list[tuple[int, ...]]
    parent: list[int | None]
    auxiliary: list[bool]

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    @property
    def root(self) -> int:
        return next(i for i, p in enumerate(self.parent) if p is None)

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in self.bags]
        for i, p in enumerate(self.parent):
            if p is not None:
                kids[p].append(i)
        return kids


def eliminate_decompose(graph: AttackGraph) -> TreeDecomposition:
    """Security-level vertex elimination (lowest level first)."""
    levels = security_levels(graph)  # raises CyclicGraphError on cycles
    dist = shortest_distances(graph, frozenset())
    if any(d == INF for d in dist.values()):
        raise ValueError("graph must be preprocessed: some nodes cannot "
                         "reach da")

    order = sorted(graph.node_ids, key=lambda v: (levels[v], v))
    pos = {v: i for i, v in enumerate(order)}
    adj: dict[int, set[int]] = {v: set() for v in graph.node_ids}
    for e in graph.edges:
        adj[e.src].add(e.dst)
        adj[e.dst].add(e.src)

    bags: list[tuple[int, ...]] = []
    bag_of: dict[int, int] = {}
    for v in order:
        rest = sorted(adj[v])
        bags.append((v, *rest))
        bag_of[v] = len(bags) - 1
        for a in rest:
            adj[a].discard(v)
            for b in rest:
                if a != b:
                    adj[a].add(b)

    parent: list[int | None] = [None] * len(bags)
    for i, bag in enumerate(bags):
        rest = bag[1:]
        if rest:
            nxt = min(rest, key=lambda u: pos[u])
            parent[i] = bag_of[nxt]
        else:
            assert bag[0] == graph.da, "only da may have an empty rest"
    return TreeDecomposition(bags, parent, [False] * len(bags))


def nicify(td: TreeDecomposition) -> TreeDecomposition:
    """Clone bags so spending and splitting are separate decisions.

    Every non-auxiliary bag with children gets one auxiliary clone
    holding all of them; auxiliary bags with more than two children are
    chained into a binary spine. Adds at most 2n bags.
    """
    bags = list(td.bags)
    parent = list(td.parent)
    auxiliary = list(td.auxiliary)
    kids = td.children()
    kids += [[] for _ in range(len(bags) - len(kids))]

    for i in range(len(td.bags)):
        if auxiliary[i] or not kids[i]:
            continue
        clone = len(bags)
        bags.append(bags[i])
        parent.append(i)
        auxiliary.append(True)
        kids.append(kids[i])
        for c in kids[i]:
            parent[c] = clone
        kids[i] = [clone]

    cursor = 0
    while cursor < len(bags):
        if auxiliary[cursor] and len(kids[cursor]) > 2:
            rest = kids[cursor][1:]
            clone = len(bags)
            bags.append(bags[cursor])
            parent.append(cursor)
            auxiliary.append(True)
            kids.append(rest)
            for c in rest:
                parent[c] = clone
            kids[cursor] = [kids[cursor][0], clone]
        cursor += 1

    out = TreeDecomposition(bags, parent, auxiliary)
    assert len(out.bags) - len(td.bags) <= 2 * len(td.bags)
    assert all(len(c) <= 2 for c in out.children())
    return out


def validate_decomposition(graph: AttackGraph,
                           td: TreeDecomposition) -> list[str]:
    """Check the decomposition axioms plus the desired extras."""
    errors = []
    covered = set()
    for bag in td.bags:
        covered.update(bag)
    missing = set(graph.node_ids) - covered
    if missing:
        errors.append(f"vertices not covered: {sorted(missing)}")

    for e in graph.edges:
        if not any(e.src in bag and e.dst in bag for bag in td.bags):
            errors.append(f"edge ({e.src},{e.dst}) not inside any bag")

    kids = td.children()
    for v in graph.node_ids:
        holding = [i for i, bag in enumerate(td.bags) if v in bag]
        hset = set(holding)
        # connected iff exactly one holding bag has its parent outside
        roots = [i for i in holding
                 if td.parent[i] is None or td.parent[i] not in hset]
        if len(roots) != 1:
            errors.append(f"bags containing {v} are not a subtree")
            continue
        sub_root = roots[0]
        if td.auxiliary[sub_root] or td.bags[sub_root][0] != v:
            errors.append(f"subtree root of {v} does not introduce it")
        elif not set(graph.successors(v)) <= set(td.bags[sub_root]):
            errors.append(f"subtree root of {v} misses out-neighbours")

    root = td.root
    if td.bags[root] != (graph.da,):
        errors.append(f"root bag is {td.bags[root]}, not ({graph.da},)")

    intro = [bag[0] for i, bag in enumerate(td.bags) if not td.auxiliary[i]]
    if len(intro) != len(set(intro)) or set(intro) != set(graph.node_ids):
        errors.append("introduced vertices are not exactly the vertex set")
    return errors


@dataclass
class DpStats:
    width: int = 0
    memo_entries: int = 0
    memo_bound: int = 0
    bag_count: int = 0


def dp_solve(graph: AttackGraph, budget: int,
             f: SuccessFunction = SuccessFunction(),
             stats: DpStats | None = None
             ) -> tuple[frozenset[int], float, int]:
    """Optimal block set on a preprocessed DAG; returns achieved width too."""
    td = nicify(eliminate_decompose(graph))
    kids = td.children()
    width = td.width
    l = max(1, max_attack_path_length(graph))
    inf_lbl = l + 1
    fval = [f.base ** k for k in range(l + 1)] + [0.0]
    s_total = max(1, len(graph.entries))
    entry_set = set(graph.entries)

    # per vertex: (candidate options) split into unblockable / blockable
    out_opts: dict[int, list[tuple[int, bool, int]]] = {}
    for v in graph.node_ids:
        out_opts[v] = [(dst, graph.edges[eid].blockable, eid)
                       for dst, eid in graph.out_adj[graph.index_of(v)]]

    memo: dict[tuple, tuple[float, tuple]] = {}
    sys.setrecursionlimit(max(10000, 20 * len(td.bags)))

    def solve(bag_id: int, ctx: tuple[int, ...], b: int) -> float:
        key = (bag_id, ctx, b)
        hit = memo.get(key)
        if hit is not None:
            return hit[0]
        bag = td.bags[bag_id]
        children = kids[bag_id]

        if td.auxiliary[bag_id]:
            label = dict(zip(bag, ctx))
            if len(children) == 1:
                value = solve(children[0], _project(children[0], label), b)
                choice: tuple = (b,)
            else:
                c1, c2 = children
                p1, p2 = _project(c1, label), _project(c2, label)
                value, choice = INF, (0,)
                for b1 in range(b + 1):
                    cand = solve(c1, p1, b1) + solve(c2, p2, b - b1)
                    if cand < value:
                        value, choice = cand, (b1,)
            memo[key] = (value, choice)
            return value

        x = bag[0]
        label = dict(zip(bag[1:], ctx))
        best_value, best_choice = INF, (0, ())
        if x == graph.da:
            z_options = [0]
        else:
            fixed = inf_lbl
            blockable = []
            for dst, can_block, eid in out_opts[x]:
                cand = min(label[dst] + 1, inf_lbl)
                if can_block:
                    blockable.append((cand, eid))
                else:
                    fixed = min(fixed, cand)
            blockable.sort()
            z_options = range(min(b, len(blockable)) + 1)

        for z in z_options:
            if x == graph.da:
                dist_x = 0
                spent: tuple[int, ...] = ()
            else:
                dist_x = fixed
                if z < len(blockable):
                    dist_x = min(dist_x, blockable[z][0])
                spent = tuple(eid for _, eid in blockable[:z])
            value = fval[dist_x] / s_total if x in entry_set else 0.0
            if children:
                full = dict(label)
                full[x] = dist_x
                value += solve(children[0], _project(children[0], full),
                               b - z)
            if value < best_value:
                best_value, best_choice = value, (z, spent)
        memo[key] = (best_value, best_choice)
        return best_value

    def _project(child_id: int, label: dict[int, int]) -> tuple[int, ...]:
        bag = td.bags[child_id]
        if td.auxiliary[child_id]:
            return tuple(label[v] for v in bag)
        return tuple(label[v] for v in bag[1:])

    root = td.root
    value = solve(root, (), budget)

    bound = (l + 2) ** (width + 1) * (budget + 1) * len(td.bags)
    assert len(memo) <= bound, f"memo {len(memo)} exceeds bound {bound}"
    if stats is not None:
        stats.width = width
        stats.memo_entries = len(memo)
        stats.memo_bound = bound
        stats.bag_count = len(td.bags)

    # replay argmin decisions to recover the block set
    blocked: list[int] = []

    def replay(bag_id: int, ctx: tuple[int, ...], b: int):
        _, choice = memo[(bag_id, ctx, b)]
        bag = td.bags[bag_id]
        children = kids[bag_id]
        if td.auxiliary[bag_id]:
            label = dict(zip(bag, ctx))
            if len(children) == 1:
                replay(children[0], _project(children[0], label), b)
            else:
                b1 = choice[0]
                replay(children[0], _project(children[0], label), b1)
                replay(children[1], _project(children[1], label), b - b1)
            return
        z, spent = choice
        blocked.extend(spent)
        if children:
            x = bag[0]
            label = dict(zip(bag[1:], ctx))
            if x == graph.da:
                dist_x = 0
            else:
                fixed = inf_lbl
                blockable = []
                for dst, can_block, eid in out_opts[x]:
                    cand = min(label[dst] + 1, inf_lbl)
                    if can_block:
                        blockable.append((cand, eid))
                    else:
                        fixed = min(fixed, cand)
                blockable.sort()
                dist_x = fixed
                if z < len(blockable):
                    dist_x = min(dist_x, blockable[z][0])
            full = dict(label)
            full[x] = dist_x
            replay(children[0], _project(children[0], full), b - z)

    replay(root, (), budget)
    witness = frozenset(blocked)
    rate = evaluate(graph, witness, f).expected_success_rate
    assert abs(rate - value) < 1e-9, (rate, value)
    return witness, rate, width
