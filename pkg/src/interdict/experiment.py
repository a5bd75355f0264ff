"""Experiment harness: repeated trials, mean rates, #Opt / #Win tallies.

Results are split into a deterministic part (rates, block sets, opt and
win counts; byte-identical across runs for equal spec + seeds) and
wall-clock timings, which are reported separately.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .budget_fpt import budget_fpt
from .generate import GenParams, gen_tree_like, mark_blockable
from .graph import AttackGraph, SuccessFunction
from .greedy import greedy
from .oracle import brute_force
from .split_fpt import split_fpt
from .tree_dp import dp_solve

OPT_TOLERANCE = 1e-6

EXACT_ALGOS = {"oracle", "budgetfpt", "splitfpt", "dp"}
ALL_ALGOS = ("oracle", "greedy", "budgetfpt", "splitfpt", "dp")


@dataclass
class ExperimentSpec:
    graph: AttackGraph | None = None      # fixed instance, or
    gen: GenParams | None = None          # a generator family
    algorithms: tuple[str, ...] = ("greedy",)
    budget: int = 1
    trials: int = 1
    seed: int = 0
    f_base: float = 0.95
    resample_entries: int | None = None   # s per trial (file graphs)
    resample_pb: float | None = None      # p_b per trial (file graphs)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.algorithms) - set(ALL_ALGOS)
        if unknown:
            raise ValueError(f"unknown algorithm(s): {sorted(unknown)}")
        if (self.graph is None) == (self.gen is None):
            raise ValueError("exactly one of graph / gen must be given")


def run_solver(algo: str, graph: AttackGraph, budget: int,
               f: SuccessFunction) -> tuple[frozenset[int], float, dict]:
    if algo == "oracle":
        blocks, rate = brute_force(graph, budget, f)
        return blocks, rate, {}
    if algo == "greedy":
        blocks, rate = greedy(graph, budget, f)
        return blocks, rate, {}
    if algo == "budgetfpt":
        blocks, rate, st = budget_fpt(graph, budget, f)
        return blocks, rate, {"combinations_explored": st.combinations_explored,
                              "combination_bound": st.bound}
    if algo == "splitfpt":
        blocks, rate, evaluated = split_fpt(graph, budget, f)
        return blocks, rate, {"strategies_evaluated": evaluated}
    if algo == "dp":
        blocks, rate, width = dp_solve(graph, budget, f)
        return blocks, rate, {"width": width}
    raise ValueError(f"unknown algorithm {algo}")


def _trial_graph(spec: ExperimentSpec, trial: int) -> AttackGraph:
    import random

    seed = spec.seed + trial
    if spec.gen is not None:
        params = GenParams(n=spec.gen.n, h=spec.gen.h,
                           max_depth=spec.gen.max_depth, s=spec.gen.s,
                           p_b=spec.gen.p_b, dag=spec.gen.dag, seed=seed,
                           uniform_entries=spec.gen.uniform_entries)
        return gen_tree_like(params)
    graph = spec.graph
    if spec.resample_entries is not None:
        rng = random.Random(seed)
        pool = sorted(i for i in graph.node_ids if i != graph.da)
        chosen = set(rng.sample(pool, spec.resample_entries))
        graph = AttackGraph([(i, i in chosen) for i in graph.node_ids],
                            [(e.src, e.dst, e.blockable)
                             for e in graph.edges], graph.da)
    if spec.resample_pb is not None:
        graph = mark_blockable(graph, spec.resample_pb, seed ^ 0x5EED)
    return graph


def _run_trial(spec: ExperimentSpec, t: int) -> tuple[dict, dict]:
    f = SuccessFunction(spec.f_base)
    graph = _trial_graph(spec, t)
    row: dict = {"trial": t, "algorithms": {}}
    trow: dict = {"trial": t, "algorithms": {}}
    for algo in spec.algorithms:
        started = time.perf_counter()
        try:
            blocks, rate, extra = run_solver(algo, graph, spec.budget, f)
            entry = {"rate": rate, "blocked": sorted(blocks), **extra}
        except Exception as exc:  # recorded, not fatal
            entry = {"error": f"{type(exc).__name__}: {exc}"}
        trow["algorithms"][algo] = round(time.perf_counter() - started, 6)
        row["algorithms"][algo] = entry
    return row, trow


def summarize(algorithms: tuple[str, ...], trials: list[dict]) -> dict:
    """Mean rates plus #Opt (vs the best exact solver, tolerance 1e-6)
    or, with no exact solver present, pairwise #Win (ties are not wins).
    """
    exact_present = [a for a in algorithms if a in EXACT_ALGOS]
    summary = {}
    for algo in algorithms:
        rates = [t["algorithms"][algo].get("rate") for t in trials]
        ok = [r for r in rates if r is not None]
        entry = {
            "mean_success_rate": sum(ok) / len(ok) if ok else None,
            "failures": len(rates) - len(ok),
        }
        if exact_present:
            n_opt = 0
            for t in trials:
                r = t["algorithms"][algo].get("rate")
                best = min((t["algorithms"][a]["rate"] for a in exact_present
                            if "rate" in t["algorithms"][a]), default=None)
                if r is not None and best is not None \
                        and abs(r - best) <= OPT_TOLERANCE:
                    n_opt += 1
            entry["n_opt"] = n_opt
        else:
            wins = 0
            for t in trials:
                r = t["algorithms"][algo].get("rate")
                others = [t["algorithms"][a].get("rate")
                          for a in algorithms if a != algo]
                if r is not None and others \
                        and all(o is not None and r < o for o in others):
                    wins += 1
            entry["n_win"] = wins
        summary[algo] = entry
    return summary


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> dict:
    """Returns {"results": <deterministic>, "timings": <wall clock>}.

    Trials are independent; jobs > 1 runs them in a process pool with
    output ordering still fixed by trial index.
    """
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(partial(_run_trial, spec),
                                  range(spec.trials)))
    else:
        pairs = [_run_trial(spec, t) for t in range(spec.trials)]
    trials = [p[0] for p in pairs]
    timings = [p[1] for p in pairs]

    summary = summarize(spec.algorithms, trials)

    mean_times = {
        algo: sum(t["algorithms"][algo] for t in timings) / len(timings)
        for algo in spec.algorithms
    }
    results = {
        "spec": {
            "algorithms": list(spec.algorithms),
            "budget": spec.budget,
            "trials": spec.trials,
            "seed": spec.seed,
            "f_base": spec.f_base,
        },
        "summary": summary,
        "trials": trials,
    }
    return {"results": results,
            "timings": {"per_trial": timings, "mean": mean_times}}


def results_csv(results: dict) -> str:
    """Summary table as CSV (deterministic fields only)."""
    lines = ["algorithm,mean_success_rate,n_opt,n_win,failures,trials"]
    trials = results["spec"]["trials"]
    for algo, entry in results["summary"].items():
        mean = entry["mean_success_rate"]
        lines.append(",".join([
            algo,
            "" if mean is None else repr(mean),
            str(entry.get("n_opt", "")),
            str(entry.get("n_win", "")),
            str(entry["failures"]),
            str(trials),
        ]))
    return "\n".join(lines) + "\n"
