"""Exhaustive ground-truth solver.

Intentionally simple and trusted: enumerate every block set of size up
to the budget and keep the best. Every equivalence test in the suite
treats this as the source of truth.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

from .errors import TooLargeError
from .graph import AttackGraph, RateEvaluator, SuccessFunction

SUBSET_GUARD = 10_000_000


def subset_count(n_candidates: int, budget: int) -> int:
    return sum(comb(n_candidates, k) for k in range(min(budget, n_candidates) + 1))


def brute_force(graph: AttackGraph, budget: int,
                f: SuccessFunction = SuccessFunction()
                ) -> tuple[frozenset[int], float]:
    """Global minimizer of the expected success rate.

    Ties resolved toward the lexicographically smallest sorted edge-id
    tuple (so the empty set beats any equally-good block set).
    """
    cands = graph.blockable_edges
    total = subset_count(len(cands), budget)
    if total > SUBSET_GUARD:
        raise TooLargeError(f"{total} subsets exceeds guard {SUBSET_GUARD}")

    ev = RateEvaluator(graph, f)
    mask = graph.blocked_mask(())
    best_rate = ev.rate(mask)
    best: tuple[int, ...] = ()
    for k in range(1, min(budget, len(cands)) + 1):
        for subset in combinations(cands, k):
            for eid in subset:
                mask[eid] = 1
            rate = ev.rate(mask)
            for eid in subset:
                mask[eid] = 0
            if rate < best_rate or (rate == best_rate and subset < best):
                best_rate = rate
                best = subset
    return frozenset(best), best_rate
