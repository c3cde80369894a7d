#!/usr/bin/env python3
"""Timing comparison of the compiled BFS kernels against the pure twins.

Runs each kernel on a bundle of graphs (seeded random plus the built-in
extension instance) and prints per-kernel medians side by side. Invoke from
the repository root:

    python3 benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import statistics
import sys
import time

import numpy as np

from opgraph import _pykernels
from opgraph import kernels as selected
from opgraph.graph import Graph
from opgraph.pipeline import fixture_set
import opgraph.base_graph as bg
import opgraph.path_compression as pc
import opgraph.obstacle_product as op

try:
    from opgraph import _speedups
except ImportError:
    _speedups = None


def build_inputs():
    rng = np.random.default_rng(0)
    inputs = {}
    for n, m in ((2_000, 12_000), (20_000, 100_000)):
        edges = rng.integers(0, n, size=(m, 2))
        edges = edges[edges[:, 0] != edges[:, 1]]
        spine = np.stack([np.arange(n - 1), np.arange(1, n)], axis=1)
        both = np.vstack([edges, spine])
        both = np.unique(np.sort(both, axis=1), axis=0)
        inputs[f"random n={n}"] = Graph(n, both)
    a = fixture_set()
    lg, ps = bg.build_base(a)
    cg = pc.compress(lg, ps)
    og = op.build_op(cg.graph, cg.pairs, 4, params=cg.params, host_kind="product")
    inputs["extension n=3744"] = og.graph
    return inputs


def time_call(fn, *args, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)

    if _speedups is None:
        print("compiled extension unavailable; timing the pure kernels only", file=sys.stderr)
    print(f"active module: {'compiled' if selected.COMPILED else 'pure'}")
    print()
    header = f"{'kernel':<20} {'graph':<20} {'pure':>12} {'compiled':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))

    for gname, g in build_inputs().items():
        alive = np.ones(len(g.indices), dtype=np.uint8)
        sources = np.arange(min(32, g.n), dtype=np.int64)
        target = g.n - 1
        calls = [
            ("bfs_distances", (g.indptr, g.indices, 0, -1)),
            ("bfs_count", (g.indptr, g.indices, 0, -1)),
            ("bfs_parents", (g.indptr, g.indices, 0)),
            ("bfs_multi", (g.indptr, g.indices, sources)),
            ("bfs_masked", (g.indptr, g.indices, alive, 0, -1)),
            ("bfs_target_masked", (g.indptr, g.indices, alive, 0, target, -1)),
        ]
        for kname, cargs in calls:
            t_pure = time_call(getattr(_pykernels, kname), *cargs, repeats=args.repeats)
            if _speedups is not None:
                t_fast = time_call(getattr(_speedups, kname), *cargs, repeats=args.repeats)
                ratio = t_pure / t_fast if t_fast > 0 else float("inf")
                print(
                    f"{kname:<20} {gname:<20} {t_pure * 1e3:>10.2f}ms "
                    f"{t_fast * 1e3:>10.2f}ms {ratio:>8.1f}x"
                )
            else:
                print(f"{kname:<20} {gname:<20} {t_pure * 1e3:>10.2f}ms {'-':>12} {'-':>9}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
