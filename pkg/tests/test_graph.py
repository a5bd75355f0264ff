import math

import pytest

from interdict.errors import CyclicGraphError, PreprocessError
from interdict.graph import (INF, AttackGraph, SuccessFunction, evaluate,
                             feedback_edge_count, max_attack_path_length,
                             max_out_degree, preprocess, security_levels,
                             shortest_distances, splitting_nodes,
                             strategy_space_size, validate)

from _corpus import corpus
from conftest import F3, make_fig2


def test_validate_fig2_ok(fig2):
    assert validate(fig2) == []


def test_validate_da_is_entry():
    g = AttackGraph(nodes=[(0, True), (1, True)], edges=[(1, 0, True)], da=0)
    assert any("da is entry" in e for e in validate(g))


def test_validate_duplicate_edge():
    g = AttackGraph(nodes=[(0, False), (1, True), (3, False)],
                    edges=[(1, 3, True), (3, 0, True), (3, 1, False),
                           (3, 1, False)], da=0)
    assert any("duplicate edge" in e for e in validate(g))


def test_validate_reports_unreachable():
    g = AttackGraph(nodes=[(0, False), (1, True), (9, False)],
                    edges=[(1, 0, True)], da=0)
    assert any("cannot reach da" in e for e in validate(g))


def test_preprocess_fig2_fixed_point(fig2):
    pruned, mapping = preprocess(fig2, {0})
    assert pruned.to_dict() == fig2.to_dict()
    assert mapping == {i: i for i in fig2.node_ids}


def test_preprocess_prunes_isolated(fig2):
    g = AttackGraph(list(fig2.nodes) + [(99, False)],
                    [(e.src, e.dst, e.blockable) for e in fig2.edges], da=0)
    pruned, mapping = preprocess(g, {0})
    assert 99 not in pruned.node_ids
    assert 99 not in mapping
    assert pruned.to_dict() == fig2.to_dict()


def test_preprocess_merges_admins():
    # two admins, node 5 feeds both; expect one da with a single 5->da edge
    g = AttackGraph(nodes=[(7, False), (8, False), (5, True)],
                    edges=[(5, 7, True), (5, 8, False)], da=7)
    pruned, mapping = preprocess(g, {7, 8})
    assert pruned.da == 7
    assert mapping[8] == 7
    assert [tuple(e) for e in pruned.edges] == [(5, 7, False)]  # unblockable wins
    assert pruned.entries == (5,)


def test_preprocess_requires_surviving_entry():
    g = AttackGraph(nodes=[(0, False), (1, True), (2, False)],
                    edges=[(1, 2, True)], da=0)
    with pytest.raises(PreprocessError):
        preprocess(g, {0})


def test_distances_fig2(fig2):
    d = shortest_distances(fig2)
    assert d[10] == 3 and d[3] == 2 and d[1] == 1 and d[0] == 0

    d = shortest_distances(fig2, {3, 4})
    assert d[10] == d[11] == d[12] == d[3] == INF

    d = shortest_distances(fig2, {0})
    assert d[10] == INF and d[11] == 3


def test_evaluate_fig2(fig2):
    assert evaluate(fig2).expected_success_rate == pytest.approx(F3)
    assert evaluate(fig2, {0, 1}).expected_success_rate == \
        pytest.approx(F3 / 3)
    assert evaluate(fig2, {3, 4}).expected_success_rate == 0.0
    ev = evaluate(fig2, {3, 4})
    assert set(ev.per_entry_distance) == {10, 11, 12}
    assert all(v == INF for v in ev.per_entry_distance.values())


def test_evaluate_rejects_unblockable(fig2):
    with pytest.raises(ValueError):
        evaluate(fig2, {5})


def test_success_function():
    f = SuccessFunction(0.95)
    assert f(0) == 1.0
    assert f(math.inf) == 0.0
    assert f(2) < f(1) < f(0)


def test_security_levels_fig2(fig2):
    lv = security_levels(fig2)
    assert lv[10] == lv[11] == lv[12] == 0
    assert lv[3] == 1
    assert lv[1] == lv[2] == 2
    assert lv[0] == 3
    for e in fig2.edges:
        assert lv[e.src] < lv[e.dst]


def test_security_levels_single_node():
    g = AttackGraph(nodes=[(0, False)], edges=[], da=0)
    assert security_levels(g) == {0: 0}


def test_security_levels_cycle():
    g = AttackGraph(nodes=[(0, False), (1, False), (2, True)],
                    edges=[(1, 2, False), (2, 1, False), (1, 0, True)], da=0)
    with pytest.raises(CyclicGraphError):
        security_levels(g)


def test_structure_params_fig2(fig2):
    assert splitting_nodes(fig2) == [3]
    assert feedback_edge_count(fig2) == 1
    assert max_out_degree(fig2) == 2
    assert max_attack_path_length(fig2) == 3
    assert strategy_space_size(fig2) == 3 <= 3 ** 1


def test_feedback_count_tree_plus_k():
    from interdict.generate import GenParams, gen_tree_like
    g = gen_tree_like(GenParams(n=15, h=0, max_depth=4, s=2, p_b=0.5, seed=3))
    assert feedback_edge_count(g) == 0
    g4 = gen_tree_like(GenParams(n=15, h=4, max_depth=4, s=2, p_b=0.5, seed=3))
    assert feedback_edge_count(g4) == 4


def test_strategy_space_bound_random():
    # product of (d_i + 1) never beats 3^h on connected instances
    for g, _ in corpus(40, seed0=77):
        assert strategy_space_size(g) <= 3 ** feedback_edge_count(g)


def test_monotonicity_random():
    # supersets of blocks never shorten distances or raise the rate
    import random
    rng = random.Random(5)
    for g, _ in corpus(25, seed0=11):
        cands = list(g.blockable_edges)
        if not cands:
            continue
        small = set(rng.sample(cands, rng.randint(0, len(cands) // 2)))
        big = small | set(rng.sample(cands, rng.randint(0, len(cands) // 2)))
        d_small = shortest_distances(g, small)
        d_big = shortest_distances(g, big)
        assert all(d_big[v] >= d_small[v] for v in g.node_ids)
        assert evaluate(g, big).expected_success_rate <= \
            evaluate(g, small).expected_success_rate + 1e-12


def test_levels_agree_with_edges_random():
    for g, _ in corpus(25, dag_only=True, seed0=23):
        lv = security_levels(g)
        for e in g.edges:
            assert lv[e.src] < lv[e.dst]


def test_duplicate_node_id_rejected():
    with pytest.raises(ValueError):
        AttackGraph(nodes=[(0, False), (0, True)], edges=[], da=0)
