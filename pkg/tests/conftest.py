import pytest

from interdict.graph import AttackGraph


def make_fig2() -> AttackGraph:
    """The worked example: entries 10-12, chain through 3, da = 0.

    Edge ids: 0:10->3  1:11->3  2:12->3  3:3->1  4:3->2  5:1->0  6:2->0.
    All blockable except 1->0 and 2->0.
    """
    return AttackGraph(
        nodes=[(0, False), (1, False), (2, False), (3, False),
               (10, True), (11, True), (12, True)],
        edges=[(10, 3, True), (11, 3, True), (12, 3, True),
               (3, 1, True), (3, 2, True), (1, 0, False), (2, 0, False)],
        da=0)


@pytest.fixture
def fig2() -> AttackGraph:
    return make_fig2()


F3 = 0.95 ** 3  # success of a 3-hop path
