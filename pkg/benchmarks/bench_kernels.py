#!/usr/bin/env python3
"""Benchmark the jitted kernels against their pure-numpy twins.

Usage: python benchmarks/bench_kernels.py [--n 1000000] [--repeats 3]

Each kernel runs once per backend for warmup (and JIT compilation),
then the best of ``--repeats`` timings is reported. Streams are
re-seeded identically per run so both backends do the same work.
"""

import argparse
import math
import time

import numpy as np

from es_drift import kernels
from es_drift.streams import derive_stream


def _series_seeds(d, r, sigma_bar):
    from scipy.special import gammainc

    lam2 = 0.5 * (d / sigma_bar) ** 2
    x2 = 0.5 * ((1.0 - r) * d / sigma_bar) ** 2
    a = 0.5 * d
    j0 = int(lam2)
    log_w0 = -lam2 if j0 == 0 else j0 * math.log(lam2) - lam2 - math.lgamma(j0 + 1)
    t0 = math.exp((a + j0) * math.log(x2) - x2 - math.lgamma(a + j0 + 1))
    return a, lam2, x2, float(gammainc(a + j0, x2)), t0, math.exp(log_w0), j0


def build_cases(n):
    m0 = np.zeros(10)
    m0[0] = 1.0
    series_args = _series_seeds(256, 0.0, 0.125) + (1e-9, 1_000_000)
    return [
        ("success_mc_hits(d=10)",
         lambda b, rng: b.success_mc_hits(0.2, 1.0, 10, n, rng)),
        ("truncated_drift_sums(d=10)",
         lambda b, rng: b.truncated_drift_sums(1.0, 0.2, 10, 1.5, 1.1629,
                                               2.8256, 0.00432, 0.1, n, rng)),
        ("har_log_progress_sums(d=10)",
         lambda b, rng: b.har_log_progress_sums(10, n, rng)),
        ("es_run(d=16, eps=1e-8)",
         lambda b, rng: b.es_run(np.concatenate(([1.0], np.zeros(15))),
                                 2.0 / 16, 1.5, 1e-8, 10_000_000,
                                 10_000_000, rng)),
        ("chisq_cdf_series(d=256)",
         lambda b, rng: b.poisson_mixture_chisq_cdf(*series_args)),
    ]


def time_case(backend, fn, repeats):
    fn(backend, derive_stream(1, 0))  # warmup / compile
    best = math.inf
    for rep in range(repeats):
        rng = derive_stream(1, rep + 1)
        start = time.perf_counter()
        fn(backend, rng)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1_000_000,
                        help="samples per Monte Carlo kernel")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = [("numpy", kernels.numpy_backend)]
    if kernels.numba_backend is not None:
        backends.append(("numba", kernels.numba_backend))
    else:
        print("numba backend unavailable; timing numpy only")

    print(f"n = {args.n}, best of {args.repeats}")
    header = f"{'kernel':34s}" + "".join(f"{name:>12s}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for label, fn in build_cases(args.n):
        timings = [time_case(backend, fn, args.repeats) for _, backend in backends]
        row = f"{label:34s}" + "".join(f"{t * 1e3:10.1f}ms" for t in timings)
        if len(timings) == 2 and timings[1] > 0:
            row += f"{timings[0] / timings[1]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
