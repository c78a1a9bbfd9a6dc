"""Benchmark the GF(2) kernel backends on the Monte Carlo hot path.

Times tree-state construction plus label extraction for each available
backend on identical realization streams, then prints per-sample cost and
the speedup of the compiled extension over the NumPy fallback.

Usage:
    python3 benchmarks/bench_backends.py [--t 8] [--samples 200] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

from qdtree.gf2 import available_backends, get_backend
from qdtree.oracle import access_set, build_state, extract_subgroup, sample_realization
from qdtree.recursion import ModelParams


def run_workload(backend, params, samples, seed):
    for i in range(samples):
        real = sample_realization(params, seed=seed, index=i)
        tab = build_state(real, backend=backend)
        for f in (0.25, 0.75):
            F = access_set(real, f)
            extract_subgroup(tab, F, backend=backend)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t", type=int, default=8, help="tree depth (default 8)")
    ap.add_argument("--p", type=float, default=0.68, help="gate rate")
    ap.add_argument("--samples", type=int, default=200,
                    help="realizations per timing pass (default 200)")
    ap.add_argument("--repeat", type=int, default=3,
                    help="timing passes per backend, best is kept (default 3)")
    ap.add_argument("--seed", type=int, default=1729)
    args = ap.parse_args(argv)

    params = ModelParams(p=args.p, f=0.5, t=args.t)
    names = available_backends()
    print(f"workload: t={args.t}, {args.samples} realizations, "
          f"build + extraction at two access fractions")
    print(f"backends available: {', '.join(names)}")

    best = {}
    for name in names:
        backend = get_backend(name)
        run_workload(backend, params, min(args.samples, 10), args.seed)  # warm up
        times = []
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            run_workload(backend, params, args.samples, args.seed)
            times.append(time.perf_counter() - t0)
        best[name] = min(times)
        print(f"{name:>10}: {best[name]:8.3f} s total, "
              f"{1e3 * best[name] / args.samples:8.3f} ms/sample")

    if "python" in best and "compiled" in best:
        print(f"   speedup: compiled is {best['python'] / best['compiled']:.1f}x "
              f"faster than the NumPy fallback")


if __name__ == "__main__":
    main()
