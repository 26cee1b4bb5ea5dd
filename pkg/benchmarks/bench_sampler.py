"""Benchmark: compiled sampler kernel vs the pure-numpy fallback.

Both kernels consume identical pre-drawn random streams, so the timing
difference isolates the per-draw sequential construction (Cholesky +
triangular solves in C vs batched numpy solves).

Usage: python benchmarks/bench_sampler.py [--count N] [--dims 1,3,8]
"""

import argparse
import time

import numpy as np

from mrig import GstzParams, build_weight_matrix
from mrig.backend import HAVE_COMPILED, get_kernel
from mrig.gstz import _marginal_b_table


def make_params(n):
    edges = [(i, i + 1, 0.5 + 0.1 * i) for i in range(n - 1)]
    W = build_weight_matrix(n, edges)
    a = 0.6 + 0.2 * np.arange(n)
    b = np.where(np.arange(n) % 2 == 0, 0.8, 0.0)
    return GstzParams(a, b, W)


def bench(kernel, p, table, streams, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        kernel(p.a, p.W.w, table, *streams)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=1_000_000)
    ap.add_argument("--dims", default="1,3,8")
    args = ap.parse_args()
    dims = [int(d) for d in args.dims.split(",")]

    names = ["python"] + (["compiled"] if HAVE_COMPILED else [])
    if not HAVE_COMPILED:
        print("note: compiled extension not built; timing the fallback only")
    print(f"{'n':>3} {'backend':>9} {'seconds':>9} {'draws/sec':>12}")
    for n in dims:
        p = make_params(n)
        table = _marginal_b_table(p)
        rng = np.random.default_rng(0)
        streams = (
            rng.standard_gamma(0.5, (args.count, n)),
            rng.standard_normal((args.count, n)),
            rng.random((args.count, n)),
        )
        results = {}
        for name in names:
            secs = bench(get_kernel(name), p, table, streams)
            results[name] = secs
            print(f"{n:>3} {name:>9} {secs:>9.3f} {args.count / secs:>12.0f}")
        if len(results) == 2:
            print(f"    speedup: {results['python'] / results['compiled']:.1f}x")


if __name__ == "__main__":
    main()
