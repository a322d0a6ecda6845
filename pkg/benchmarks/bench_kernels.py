"""Benchmark the compiled interference kernel against the numpy fallback.

Run: python3 benchmarks/bench_kernels.py [--targets N] [--receivers K]
"""

import argparse
import time

import numpy as np

from unbplan._kernels import _fallback

try:
    from unbplan._kernels import _core
except ImportError:
    _core = None


def make_case(n_events, n_targets, n_rx, rng):
    starts = np.sort(rng.uniform(0.0, 3600.0, n_events))
    durations = np.full(n_events, 0.267)
    freqs = rng.uniform(300.0, 599_700.0, n_events)
    bandwidths = np.full(n_events, 600.0)
    rel_power = np.ones(n_events)
    target_index = np.sort(rng.choice(n_events, n_targets, replace=False))
    dist_pow = rng.uniform(1e-16, 1e-12, (n_events, n_rx))
    fading = rng.standard_exponential((n_events, n_rx))
    return starts, durations, freqs, bandwidths, rel_power, target_index, dist_pow, fading


def bench(fn, args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--events", type=int, default=150_000)
    ap.add_argument("--targets", type=int, default=100_000)
    ap.add_argument("--receivers", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    case = make_case(args.events, args.targets, args.receivers, rng)

    t_py, out_py = bench(_fallback.interference_matrix, case)
    print(f"numpy fallback: {t_py:.3f} s")
    if _core is None:
        print("compiled kernel not available")
        return
    t_cy, out_cy = bench(_core.interference_matrix, case)
    print(f"cython kernel:  {t_cy:.3f} s  (speedup {t_py / t_cy:.1f}x)")
    err = np.max(np.abs(out_py - out_cy) / np.maximum(np.abs(out_py), 1e-300))
    print(f"max relative difference: {err:.2e}")


if __name__ == "__main__":
    main()
