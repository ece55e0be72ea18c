#!/usr/bin/env python3
"""Benchmark the hot kernels on the numba and numpy backends.

Usage:
    python benchmarks/bench_backends.py [--n 1500] [--dim 39] [--repeats 5]

Times pairwise squared distances, affinity construction, and the
mean-connectivity estimate (the inner loop of the bandwidth search) on
both implementations and prints a speedup table.  Run on a frame count
near your real workload; the defaults match a 60 s / 8 kHz sequence.
"""

import argparse
import time

import numpy as np

from kernelfuse import _kernels
from kernelfuse._backend import HAVE_NUMBA


def best_of(fn, repeats, *args):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1500, help="frame count")
    parser.add_argument("--dim", type=int, default=39, help="feature dimension")
    parser.add_argument("--repeats", type=int, default=5, help="repeats per timing (best-of)")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    x = rng.standard_normal((args.n, args.dim))
    d2 = _kernels.pairwise_sq_dists_numpy(x)
    eps = 2.0 * float(np.median(d2[d2 > 0]))

    cases = [
        ("pairwise_sq_dists", "pairwise_sq_dists", (x,)),
        ("affinity", "affinity", (d2, eps)),
        ("delta_hat", "delta_hat", (d2, eps)),
    ]

    print(f"n={args.n} dim={args.dim} repeats={args.repeats} (best-of)")
    if not HAVE_NUMBA:
        print("numba not installed; timing the numpy path only\n")
    header = f"{'kernel':<20} {'numpy [ms]':>12}"
    if HAVE_NUMBA:
        header += f" {'numba [ms]':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))

    for label, stem, call_args in cases:
        t_np = best_of(getattr(_kernels, f"{stem}_numpy"), args.repeats, *call_args)
        line = f"{label:<20} {t_np * 1e3:>12.2f}"
        if HAVE_NUMBA:
            fn = getattr(_kernels, f"{stem}_numba")
            fn(*call_args)  # JIT warmup outside the timed region
            t_nb = best_of(fn, args.repeats, *call_args)
            line += f" {t_nb * 1e3:>12.2f} {t_np / t_nb:>8.2f}x"
        print(line)


if __name__ == "__main__":
    main()
