#!/usr/bin/env python3
"""Benchmark the compiled evaluation kernels against the numpy fallback.

Times the two hot kernels (per-class rank-one products and the
leave-one-out scatter) plus a full objective evaluation built on them,
across the problem sizes the experiment harness actually visits.

Run:  python benchmarks/bench_kernels.py [--repeats 200]
"""
import argparse
import time

import numpy as np

import symdecomp as sd
from symdecomp import _kernels
from symdecomp.objectives import WeightScheme, eval_fw

SIZES = [(3, 4, 2), (4, 3, 5), (6, 6, 4), (4, 25, 3), (4, 40, 5), (6, 12, 6)]


def best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)} (active: {_kernels.BACKEND})")
    header = (f"{'size':>10} {'classes':>8} |"
              + "".join(f" {'mono-' + b:>14}" for b in backends)
              + " |"
              + "".join(f" {'scatter-' + b:>14}" for b in backends)
              + f" {'speedup':>8}")
    print(header)

    rng = np.random.default_rng(0)
    for m, n, p in SIZES:
        cat = sd.build_catalog(m, n)
        X = rng.standard_normal((n, p))
        coeff = rng.standard_normal(cat.size)
        mono = {
            b: best_of(lambda b=b: _kernels.monomial_values(cat.reps, X, impl=b),
                       args.repeats)
            for b in backends
        }
        scat = {
            b: best_of(
                lambda b=b: _kernels.all_but_one_scatter(cat.reps, coeff, X, impl=b),
                args.repeats,
            )
            for b in backends
        }
        if "cython" in backends:
            speedup = (mono["numpy"] + scat["numpy"]) / (mono["cython"] + scat["cython"])
            tag = f"{speedup:7.1f}x"
        else:
            tag = "    n/a"
        line = (f"{f'{m}x{n}x{p}':>10} {cat.size:>8} |"
                + "".join(f" {mono[b] * 1e6:>12.1f}us" for b in backends)
                + " |"
                + "".join(f" {scat[b] * 1e6:>12.1f}us" for b in backends)
                + f" {tag:>8}")
        print(line)

    print("\nfull objective evaluation (value + gradients):")
    for m, n, p in SIZES:
        cat = sd.build_catalog(m, n)
        tensor = sd.SymTensor(cat, rng.standard_normal(cat.size))
        model = sd.KruskalSymModel(rng.standard_normal(p), rng.standard_normal((n, p)))
        times = {}
        for b in backends:
            import symdecomp._kernels as K

            old = K.BACKEND
            K.BACKEND = b
            try:
                times[b] = best_of(
                    lambda: eval_fw(tensor, model, WeightScheme.weighted()),
                    max(args.repeats // 4, 10),
                )
            finally:
                K.BACKEND = old
        row = " ".join(f"{b}: {times[b] * 1e6:9.1f}us" for b in backends)
        if "cython" in backends:
            row += f"   ({times['numpy'] / times['cython']:.1f}x)"
        print(f"{f'{m}x{n}x{p}':>10}  {row}")


if __name__ == "__main__":
    main()
