import pytest

from interdict.errors import InfeasibleError
from interdict.generate import (GenParams, add_decoys, add_substitutable,
                                gen_clique_reduction, gen_tree_like,
                                mark_blockable)
from interdict.graph import (INF, AttackGraph, evaluate, feedback_edge_count,
                             preprocess, security_levels, shortest_distances,
                             splitting_nodes)
from interdict.oracle import brute_force

from conftest import F3, make_fig2


def test_fig2_family_shape():
    g = gen_tree_like(GenParams(n=7, h=1, max_depth=3, s=3, p_b=1.0,
                                dag=True, seed=4))
    assert g.m == 7
    assert feedback_edge_count(g) == 1
    assert len(set(security_levels(g).values())) == 4
    assert len(g.entries) == 3
    assert all(e.blockable for e in g.edges)  # p_b = 1


def test_exact_tree():
    g = gen_tree_like(GenParams(n=12, h=0, max_depth=4, s=2, p_b=0.5, seed=9))
    assert feedback_edge_count(g) == 0
    assert g.m == g.n - 1


def test_determinism_byte_identical():
    p = GenParams(n=30, h=3, max_depth=5, s=4, p_b=0.4, dag=True, seed=123)
    assert gen_tree_like(p).to_json() == gen_tree_like(p).to_json()


def test_dag_mode_always_acyclic():
    for seed in range(10):
        g = gen_tree_like(GenParams(n=25, h=5, max_depth=4, s=3, p_b=0.3,
                                    dag=True, seed=seed))
        security_levels(g)  # raises if cyclic


def test_infeasible_depth():
    with pytest.raises(InfeasibleError):
        gen_tree_like(GenParams(n=3, h=0, max_depth=5, s=1, p_b=0.5, seed=0))


def test_mark_blockable_extremes(fig2):
    all_on = mark_blockable(fig2, 1.0, seed=1)
    assert all(e.blockable for e in all_on.edges)
    all_off = mark_blockable(fig2, 0.0, seed=1)
    assert not any(e.blockable for e in all_off.edges)
    # p_b = 0 leaves nothing to block: every solver returns evaluate({})
    blocks, rate = brute_force(all_off, 3)
    assert blocks == frozenset()
    assert rate == evaluate(all_off).expected_success_rate


def test_mark_blockable_deterministic(fig2):
    a = mark_blockable(fig2, 0.5, seed=42)
    b = mark_blockable(fig2, 0.5, seed=42)
    assert a.to_json() == b.to_json()


def test_mark_blockable_splitting_all_or_none():
    for seed in range(20):
        g = gen_tree_like(GenParams(n=20, h=3, max_depth=4, s=3, p_b=0.5,
                                    dag=True, seed=seed))
        for t in splitting_nodes(g):
            flags = {g.edges[eid].blockable
                     for _, eid in g.out_adj[g.index_of(t)]}
            assert len(flags) == 1  # all out-edges agree


def test_add_substitutable_fig2(fig2):
    g = add_substitutable(fig2, seed=0, prob=1.0)
    # every blockable edge with an onward successor got a duplicate head
    assert g.n == fig2.n + 5
    assert security_levels(g)  # still acyclic
    # severing entry 10 now takes two blocks: one block cannot cut it
    d = shortest_distances(g, {0})
    assert d[10] < INF


def test_add_substitutable_noop_without_blockables(fig2):
    bare = mark_blockable(fig2, 0.0, seed=0)
    assert add_substitutable(bare, seed=1, prob=1.0).to_dict() == bare.to_dict()


def test_add_decoys_pruned(fig2):
    g = add_decoys(fig2, 25, seed=8)
    assert g.n == fig2.n + 25
    pruned, _ = preprocess(g, {0})
    assert pruned.to_dict() == fig2.to_dict()


def test_clique_reduction_counts():
    k3 = gen_clique_reduction(3, [(0, 1), (0, 2), (1, 2)])
    assert k3.n == 3 + 2 * 3 + 1 == 10
    assert k3.m == 2 * 3 + 2 * 3 == 12
    assert len(k3.entries) == 3
    d = shortest_distances(k3)
    assert all(d[e] == 3 for e in k3.entries)


def test_clique_reduction_oracle_values():
    k3 = gen_clique_reduction(3, [(0, 1), (0, 2), (1, 2)])
    blocks, rate = brute_force(k3, 3)
    assert rate == 0.0
    blocks, rate = brute_force(k3, 2)
    assert rate == pytest.approx(F3 * 2 / 3)  # one entry severed


def test_clique_reduction_matches_induced_edges():
    # severed entries with budget b == max edges induced by b vertices
    from itertools import combinations
    import random
    rng = random.Random(31)
    for trial in range(8):
        n = rng.randint(3, 6)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        edges = sorted(rng.sample(pairs, rng.randint(1, len(pairs))))
        g = gen_clique_reduction(n, edges)
        for b in range(0, min(4, n) + 1):
            _, rate = brute_force(g, b)
            best_cover = max(
                (sum(1 for (i, j) in edges if i in sub and j in sub)
                 for sub in combinations(range(n), min(b, n))),
                default=0)
            expected = (len(edges) - best_cover) / len(edges) * F3
            assert rate == pytest.approx(expected, abs=1e-12), (n, edges, b)


def test_clique_reduction_rejects_bad_input():
    with pytest.raises(ValueError):
        gen_clique_reduction(3, [(0, 0)])
    with pytest.raises(ValueError):
        gen_clique_reduction(3, [(0, 1), (1, 0)])


def test_clique_reduction_no_edges_means_no_entries():
    from interdict.errors import PreprocessError
    g = gen_clique_reduction(3, [])
    assert not g.entries
    with pytest.raises(PreprocessError):
        preprocess(g, {0})


def test_substitutable_deterministic(fig2):
    a = add_substitutable(fig2, seed=5, prob=0.5)
    b = add_substitutable(fig2, seed=5, prob=0.5)
    assert a.to_json() == b.to_json()
