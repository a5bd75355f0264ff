"""Compiled vs pure-Python kernel benchmark.

Times the fused BFS + rate kernel (the hot call of the oracle, greedy
and branching loops) and a full greedy solve on a mid-size instance,
once per backend.

Run: python benchmarks/bench_kernels.py [--n 2000] [--repeats 200]
"""

import argparse
import random
import time

from interdict import _pykernels
from interdict.generate import GenParams, gen_tree_like
from interdict.graph import SuccessFunction
from interdict.greedy import greedy

try:
    from interdict import _core
except ImportError:
    _core = None


def bench_kernel(impl, graph, repeats: int) -> float:
    indptr, src, eids = graph._rev_csr
    da = graph.index_of(graph.da)
    entries = graph._entry_idx
    ftable = SuccessFunction().table(graph.n)
    rng = random.Random(1)
    cands = list(graph.blockable_edges)
    masks = []
    for _ in range(25):
        mask = graph.blocked_mask(rng.sample(cands, min(10, len(cands))))
        masks.append(mask)
    started = time.perf_counter()
    for i in range(repeats):
        impl.blocked_rate(graph.n, indptr, src, eids, da, masks[i % 25],
                          entries, ftable)
    return (time.perf_counter() - started) / repeats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()

    graph = gen_tree_like(GenParams(n=args.n, h=20, max_depth=8, s=8,
                                    p_b=0.3, dag=True, seed=12345))
    print(f"instance: n={graph.n} m={graph.m} "
          f"blockable={len(graph.blockable_edges)}")

    pure = bench_kernel(_pykernels, graph, args.repeats)
    print(f"pure     blocked_rate: {pure * 1e6:9.1f} us/call")
    if _core is None:
        print("compiled extension not built; install with "
              "`pip install -e . --no-build-isolation`")
        return
    fast = bench_kernel(_core, graph, args.repeats)
    print(f"compiled blocked_rate: {fast * 1e6:9.1f} us/call")
    print(f"speedup: {pure / fast:.1f}x")

    # whole-solver comparison: swap the selected backend in place
    from interdict import kernels

    saved = (kernels.hop_distances, kernels.blocked_rate)
    try:
        for name, impl in (("compiled", _core), ("pure", _pykernels)):
            kernels.hop_distances = impl.hop_distances
            kernels.blocked_rate = impl.blocked_rate
            started = time.perf_counter()
            _, rate = greedy(graph, 10)
            elapsed = time.perf_counter() - started
            print(f"{name:8s} greedy b=10: {elapsed:6.3f}s (rate {rate:.6f})")
    finally:
        kernels.hop_distances, kernels.blocked_rate = saved


if __name__ == "__main__":
    main()
