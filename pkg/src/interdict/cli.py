"""Command-line surface.

Subcommands: generate, preprocess, solve, evaluate, eval-strategy,
condense, stats, experiment. Graphs travel as JSON files; results are
JSON on stdout. Exit codes: 0 ok, 1 infeasible or guard tripped,
2 violated precondition (cyclic input for dp, malformed usage).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .budget_fpt import budget_fpt
from .condense import condense
from .errors import (CyclicGraphError, InfeasibleError, NotATreeError,
                     PreprocessError, TooLargeError)
from .experiment import ExperimentSpec, results_csv, run_experiment
from .generate import (GenParams, add_decoys, add_substitutable,
                       gen_clique_reduction, gen_tree_like)
from .graph import (INF, AttackGraph, SuccessFunction, evaluate, graph_stats,
                    load_graph, preprocess, save_graph, shortest_distances,
                    splitting_nodes, validate)
from .greedy import greedy
from .oracle import brute_force
from .split_fpt import eval_strategy, split_fpt
from .tree_dp import DpStats, dp_solve, eliminate_decompose


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _remove_nodes(graph: AttackGraph, drop: list[int]) -> AttackGraph:
    dropset = set(drop)
    return AttackGraph(
        [(i, e) for i, e in graph.nodes if i not in dropset],
        [(e.src, e.dst, e.blockable) for e in graph.edges
         if e.src not in dropset and e.dst not in dropset],
        graph.da)


def cmd_generate(args) -> int:
    if args.family == "clique":
        pairs = [tuple(int(x) for x in p.split("-"))
                 for p in args.clique_edges.split(",") if p]
        graph = gen_clique_reduction(args.clique_nodes, pairs)
    else:
        params = GenParams(n=args.n, h=args.extra_edges,
                           max_depth=args.max_depth, s=args.entries,
                           p_b=args.pb, dag=not args.cyclic, seed=args.seed,
                           uniform_entries=args.uniform_entries)
        graph = gen_tree_like(params)
        if args.substitutable > 0:
            graph = add_substitutable(graph, seed=args.seed + 1,
                                      prob=args.substitutable)
        if args.decoys > 0:
            graph = add_decoys(graph, args.decoys, seed=args.seed + 2)
    if args.out:
        save_graph(graph, args.out)
    else:
        print(graph.to_json())
    return 0


def cmd_preprocess(args) -> int:
    graph = load_graph(args.graph)
    admins = set(_int_list(args.admins)) if args.admins else {graph.da}
    pruned, mapping = preprocess(graph, admins)
    if args.out:
        save_graph(pruned, args.out)
    else:
        print(pruned.to_json())
    print(json.dumps({"kept": pruned.n, "dropped": graph.n - pruned.n,
                      "da": pruned.da}), file=sys.stderr)
    return 0


def cmd_solve(args) -> int:
    graph = load_graph(args.graph)
    if args.remove_nodes:
        graph = _remove_nodes(graph, _int_list(args.remove_nodes))
    f = SuccessFunction(args.f_base)
    extra: dict = {}
    started = time.perf_counter()
    if args.algo == "oracle":
        blocks, rate = brute_force(graph, args.budget, f)
    elif args.algo == "greedy":
        blocks, rate = greedy(graph, args.budget, f,
                              spend_full_budget=not args.no_force_spend)
    elif args.algo == "budgetfpt":
        blocks, rate, st = budget_fpt(graph, args.budget, f,
                                      prune=not args.no_prune)
        extra = {"combinations_explored": st.combinations_explored,
                 "combination_bound": st.bound}
    elif args.algo == "splitfpt":
        blocks, rate, evaluated = split_fpt(graph, args.budget, f)
        extra = {"strategies_evaluated": evaluated}
    elif args.algo == "dp":
        st = DpStats()
        blocks, rate, width = dp_solve(graph, args.budget, f, stats=st)
        extra = {"width": width}
        if args.stats:
            extra.update({"memo_entries": st.memo_entries,
                          "memo_bound": st.memo_bound,
                          "bag_count": st.bag_count})
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(args.algo)
    elapsed = time.perf_counter() - started
    out = {
        "algo": args.algo,
        "budget": args.budget,
        "rate": rate,
        "blocked": sorted(blocks),
        "blocked_edges": [[graph.edges[e].src, graph.edges[e].dst]
                          for e in sorted(blocks)],
        "time_s": round(elapsed, 6),
    }
    if args.stats:
        out.update(extra)
    print(json.dumps(out))
    return 0


def cmd_evaluate(args) -> int:
    graph = load_graph(args.graph)
    blocks = frozenset(_int_list(args.blocked)) if args.blocked else frozenset()
    ev = evaluate(graph, blocks, SuccessFunction(args.f_base))
    print(json.dumps({
        "rate": ev.expected_success_rate,
        "per_entry_distance": {str(k): (-1 if v == INF else v)
                               for k, v in sorted(ev.per_entry_distance.items())},
    }))
    return 0


def cmd_eval_strategy(args) -> int:
    graph = load_graph(args.graph)
    f = SuccessFunction(args.f_base)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            req = json.loads(line)
            strategy = {int(k): int(v) for k, v in req["strategy"].items()}
            valid, blocks, rate = eval_strategy(graph, strategy,
                                                int(req["budget"]), f)
            resp = {"valid": valid, "rate": rate, "blocked": sorted(blocks)}
        except Exception as exc:
            resp = {"error": f"{type(exc).__name__}: {exc}"}
        sys.stdout.write(json.dumps(resp) + "\n")
        sys.stdout.flush()
    return 0


def cmd_condense(args) -> int:
    graph = load_graph(args.graph)
    cg = condense(graph)
    text = cg.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_stats(args) -> int:
    graph = load_graph(args.graph)
    st = graph_stats(graph)
    try:
        st["w"] = eliminate_decompose(graph).width
    except (CyclicGraphError, ValueError):
        st["w"] = None
    st["validation_errors"] = validate(graph)
    print(json.dumps(st))
    return 0


def cmd_experiment(args) -> int:
    gen = None
    graph = None
    if args.graph:
        graph = load_graph(args.graph)
    else:
        gen = GenParams(n=args.n, h=args.extra_edges, max_depth=args.max_depth,
                        s=args.entries, p_b=args.pb, dag=not args.cyclic,
                        seed=0, uniform_entries=args.uniform_entries)
    spec = ExperimentSpec(
        graph=graph, gen=gen, algorithms=tuple(args.algos.split(",")),
        budget=args.budget, trials=args.trials, seed=args.seed,
        f_base=args.f_base,
        resample_entries=args.resample_entries,
        resample_pb=args.resample_pb)
    out = run_experiment(spec, jobs=args.jobs)
    results, timings = out["results"], out["timings"]

    if args.out:
        with open(args.out + ".json", "w") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(args.out + ".csv", "w") as fh:
            fh.write(results_csv(results))
        with open(args.out + ".timings.json", "w") as fh:
            json.dump(timings, fh, indent=2, sort_keys=True)
            fh.write("\n")

    print(f"{'algorithm':<12} {'Success Rate':>14} {'Time[s]':>10} "
          f"{'#Opt':>6} {'#Win':>6}")
    for algo, entry in results["summary"].items():
        mean = entry["mean_success_rate"]
        print(f"{algo:<12} "
              f"{'-' if mean is None else f'{mean:.6f}':>14} "
              f"{timings['mean'][algo]:>10.3f} "
              f"{entry.get('n_opt', '-'):>6} {entry.get('n_win', '-'):>6}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="interdict",
        description="Shortest-path edge interdiction solvers for "
                    "attack graphs")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="emit a synthetic instance")
    g.add_argument("--family", choices=["tree", "clique"], default="tree")
    g.add_argument("--n", type=int, default=50)
    g.add_argument("--extra-edges", type=int, default=0, metavar="H")
    g.add_argument("--max-depth", type=int, default=4)
    g.add_argument("--entries", type=int, default=3, metavar="S")
    g.add_argument("--pb", type=float, default=0.2)
    g.add_argument("--cyclic", action="store_true",
                   help="allow arbitrary extra edges (default keeps a DAG)")
    g.add_argument("--uniform-entries", action="store_true",
                   help="sample entries uniformly instead of deepest-first")
    g.add_argument("--substitutable", type=float, default=0.0, metavar="P",
                   help="duplicate blockable-edge heads with probability P")
    g.add_argument("--decoys", type=int, default=0,
                   help="extra nodes that cannot reach da")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--clique-nodes", type=int, default=3)
    g.add_argument("--clique-edges", default="0-1,0-2,1-2",
                   help="undirected edges as i-j pairs, comma separated")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("preprocess", help="merge admins, prune dead nodes")
    p.add_argument("graph")
    p.add_argument("--admins", help="comma separated admin node ids "
                                    "(default: the graph's da)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("solve", help="run one solver")
    s.add_argument("graph")
    s.add_argument("--algo", required=True,
                   choices=["oracle", "greedy", "budgetfpt", "splitfpt", "dp"])
    s.add_argument("--budget", type=int, required=True)
    s.add_argument("--f-base", type=float, default=0.95)
    s.add_argument("--stats", action="store_true")
    s.add_argument("--remove-nodes", metavar="IDS",
                   help="delete these nodes first (dp acyclicity workflow)")
    s.add_argument("--no-prune", action="store_true",
                   help="budgetfpt: full enumeration, no running-best cutoff")
    s.add_argument("--no-force-spend", action="store_true",
                   help="greedy: stop when no block strictly improves")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("evaluate", help="objective value of a block set")
    e.add_argument("graph")
    e.add_argument("--blocked", default="", help="comma separated edge ids")
    e.add_argument("--f-base", type=float, default=0.95)
    e.set_defaults(func=cmd_evaluate)

    es = sub.add_parser("eval-strategy",
                        help="score attacker classifications from stdin "
                             "(one JSON request per line)")
    es.add_argument("graph")
    es.add_argument("--f-base", type=float, default=0.95)
    es.set_defaults(func=cmd_eval_strategy)

    c = sub.add_parser("condense", help="emit the condensed graph JSON")
    c.add_argument("graph")
    c.add_argument("--out")
    c.set_defaults(func=cmd_condense)

    st = sub.add_parser("stats", help="n, m, s, l, h, t, d, w")
    st.add_argument("graph")
    st.set_defaults(func=cmd_stats)

    x = sub.add_parser("experiment", help="repeated-trial comparison")
    x.add_argument("--graph", help="fixed instance file (else generate)")
    x.add_argument("--n", type=int, default=100)
    x.add_argument("--extra-edges", type=int, default=0, metavar="H")
    x.add_argument("--max-depth", type=int, default=4)
    x.add_argument("--entries", type=int, default=3, metavar="S")
    x.add_argument("--pb", type=float, default=0.2)
    x.add_argument("--cyclic", action="store_true")
    x.add_argument("--uniform-entries", action="store_true")
    x.add_argument("--algos", required=True,
                   help="comma separated algorithm names")
    x.add_argument("--budget", type=int, required=True)
    x.add_argument("--trials", type=int, default=10)
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--f-base", type=float, default=0.95)
    x.add_argument("--resample-entries", type=int,
                   help="re-sample this many entries per trial (file graphs)")
    x.add_argument("--resample-pb", type=float,
                   help="re-mark blockable edges per trial (file graphs)")
    x.add_argument("--jobs", type=int, default=1)
    x.add_argument("--out", help="prefix for .json/.csv/.timings.json files")
    x.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TooLargeError, InfeasibleError, PreprocessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CyclicGraphError, NotATreeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
