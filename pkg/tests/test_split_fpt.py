import pytest

from interdict.errors import TooLargeError
from interdict.generate import GenParams, gen_tree_like
from interdict.graph import (AttackGraph, evaluate, feedback_edge_count,
                             strategy_space_size)
from interdict.oracle import brute_force
from interdict.split_fpt import (NONE_ROUTE, enumerate_strategies,
                                 eval_strategy, routes_by_split, split_fpt)

from _corpus import corpus
from conftest import F3


def test_enumerate_fig2(fig2):
    strategies = list(enumerate_strategies(fig2))
    assert strategies == [{3: 0}, {3: 1}, {3: NONE_ROUTE}]


def test_enumerate_no_splits():
    g = AttackGraph(nodes=[(0, False), (1, True)], edges=[(1, 0, True)], da=0)
    assert list(enumerate_strategies(g)) == [{}]


def test_enumerate_two_splits():
    g = AttackGraph(
        nodes=[(0, False), (1, False), (2, False), (3, True), (4, True)],
        edges=[(3, 1, True), (3, 2, True), (4, 1, True), (4, 2, True),
               (1, 0, False), (2, 0, False)],
        da=0)
    assert len(list(enumerate_strategies(g))) == 9  # (2+1)^2


def test_enumeration_guard():
    # 14 splitting nodes of out-degree 9 -> 10^14 strategies
    nodes = [(0, False)]
    edges = []
    nid = 1
    for t in range(14):
        split = nid
        nodes.append((split, True))
        nid += 1
        for _ in range(9):
            nodes.append((nid, False))
            edges.append((split, nid, True))
            edges.append((nid, 0, False))
            nid += 1
    g = AttackGraph(nodes, edges, da=0)
    with pytest.raises(TooLargeError):
        list(enumerate_strategies(g))


def test_routes_fig2(fig2):
    routes = routes_by_split(fig2)
    assert [r.edges for r in routes[3]] == [(3, 5), (4, 6)]
    assert all(r.endpoint == 0 for r in routes[3])


def test_eval_strategy_taken_route(fig2):
    valid, blocks, rate = eval_strategy(fig2, {3: 0}, 2)
    assert valid
    # equal-length untaken route is not forced; greedy severs two entries
    assert blocks == {0, 1}
    assert rate == pytest.approx(F3 / 3)


def test_eval_strategy_none_route(fig2):
    valid, blocks, rate = eval_strategy(fig2, {3: NONE_ROUTE}, 2)
    assert valid and rate == 0.0 and blocks == {3, 4}


def test_eval_strategy_infeasible_budget(fig2):
    valid, blocks, rate = eval_strategy(fig2, {3: NONE_ROUTE}, 1)
    assert not valid and blocks == frozenset() and rate == 1.0


def test_eval_strategy_is_deterministic(fig2):
    runs = [eval_strategy(fig2, {3: 0}, 2) for _ in range(3)]
    assert all(r == runs[0] for r in runs)


def test_eval_strategy_rejects_malformed(fig2):
    with pytest.raises(ValueError):
        eval_strategy(fig2, {}, 2)
    with pytest.raises(ValueError):
        eval_strategy(fig2, {3: 7}, 2)


def test_eval_strategy_rate_is_reevaluated(fig2):
    # the reported rate must equal evaluate() of the returned block set
    for strategy in enumerate_strategies(fig2):
        valid, blocks, rate = eval_strategy(fig2, strategy, 2)
        if valid:
            assert rate == evaluate(fig2, blocks).expected_success_rate


def test_split_fig2(fig2):
    blocks, rate, evaluated = split_fpt(fig2, 2)
    assert rate == 0.0 and blocks == {3, 4}
    assert evaluated == 3
    _, rate, _ = split_fpt(fig2, 1)
    assert rate == pytest.approx(2 / 3 * F3)


def test_oracle_equivalence_and_strategy_count():
    for g, b in corpus(40, seed0=909):
        _, orate = brute_force(g, b)
        _, rate, evaluated = split_fpt(g, b)
        assert abs(rate - orate) <= 1e-9
        assert evaluated == strategy_space_size(g)
        assert evaluated <= 3 ** feedback_edge_count(g)
