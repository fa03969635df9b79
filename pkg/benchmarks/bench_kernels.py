"""Compare compiled and pure-Python kernels on the insert paths.

    python benchmarks/bench_kernels.py [--n 2000000]
"""
import argparse
import time

import numpy as np

from streamcdf import kernels
from streamcdf.grid import build_tail_weighted_grid, build_uniform_grid


def _time(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench(impl, grid, values, window, block, chunk):
    uniform = grid.kind == "uniform"
    nslots = grid.bins + 2

    def cumulative():
        counts = np.zeros(nslots, np.int64)
        for part in np.array_split(values, max(1, values.size // chunk)):
            impl.insert_many(grid.edges, uniform, counts, part)

    def windowed():
        k = window // block
        staging, agg = np.zeros(nslots, np.int64), np.zeros(nslots, np.int64)
        ring, state = np.zeros((k, nslots), np.int64), np.zeros(4, np.int64)
        for part in np.array_split(values, max(1, values.size // chunk)):
            impl.window_push(grid.edges, uniform, part, staging, ring, agg, state, block)

    return {"cumulative": values.size / _time(cumulative), "windowed": values.size / _time(windowed)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2_000_000)
    ap.add_argument("--chunk", type=int, default=10_000)
    args = ap.parse_args()

    values = np.random.default_rng(0).gamma(2.0, 50.0, args.n)
    cases = [
        ("uniform/1000 bins, W=10000 B=1000", build_uniform_grid(0, 1000, 1000), 10_000, 1000),
        ("tail/1000 bins, W=10000 B=1000", build_tail_weighted_grid(0, 1000, 1000, 50, 600, (0.3, 0.4, 0.3)), 10_000, 1000),
        ("uniform/200 bins, W=64 B=8", build_uniform_grid(0, 1000, 200), 64, 8),
    ]
    backends = kernels.available_backends()
    print(f"{args.n:,} samples, chunks of {args.chunk:,}; selected backend: {kernels.BACKEND}")
    print(f"{'case':40s} {'path':11s} " + " ".join(f"{name:>14s}" for name in backends) + "   speedup")
    for label, grid, window, block in cases:
        rates = {name: bench(impl, grid, values, window, block, args.chunk) for name, impl in backends.items()}
        for path in ("cumulative", "windowed"):
            row = " ".join(f"{rates[name][path]:>12,.0f}/s" for name in backends)
            speed = ""
            if "cython" in rates:
                speed = f"{rates['cython'][path] / rates['python'][path]:8.1f}x"
            print(f"{label:40s} {path:11s} {row} {speed}")


if __name__ == "__main__":
    main()
