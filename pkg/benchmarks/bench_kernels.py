#!/usr/bin/env python3
"""Benchmark the compiled vs pure NumPy simulation kernels.

Generates one acquisition at the demonstration operating point
(m = 1.3, meander pattern, 100 kHz, 10 ns dead time) with each backend,
checks the outputs are byte-identical, and reports throughput.

Usage: python benchmarks/bench_kernels.py [--n-bits N] [--repeats R]
"""

import argparse
import time

import numpy as np

from kennedyrx import kernels
from kennedyrx.bounds import SignalParams
from kennedyrx.model import default_receiver, mean_counts
from kennedyrx.sim import generate_bits

SEED = 2024


def run_backend(backend, bits, lam0, lam1, receiver):
    t_bin = receiver.timing.bin_duration_ps
    res = receiver.detector.timing_resolution_ps
    timings = {}
    t0 = time.perf_counter()
    counts = kernels.sample_bin_counts(bits, lam0, lam1, SEED, backend=backend)
    timings["counts"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    events = kernels.place_bin_events(counts, SEED, t_bin, res, 0, backend=backend)
    timings["place"] = time.perf_counter() - t0
    events.sort()
    t0 = time.perf_counter()
    kept = kernels.filter_dead_time(events, receiver.detector.dead_time_ps, backend=backend)
    timings["dead_time"] = time.perf_counter() - t0
    return counts, events, kept, timings


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-bits", type=int, default=1_000_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    receiver = default_receiver(n_bits=args.n_bits)
    signal = SignalParams(1.3)
    lam0 = mean_counts(0, signal, receiver)
    lam1 = mean_counts(1, signal, receiver)
    bits = np.asarray(generate_bits(args.n_bits, "alternating_meander"))

    backends = ["python"]
    if kernels.COMPILED_AVAILABLE:
        backends.insert(0, "cython")
    else:
        print("note: compiled backend not available; benchmarking pure NumPy only")

    results = {}
    for backend in backends:
        best = None
        for _ in range(args.repeats):
            counts, events, kept, timings = run_backend(backend, bits, lam0, lam1, receiver)
            total = sum(timings.values())
            if best is None or total < best[0]:
                best = (total, timings, counts, events, kept)
        results[backend] = best

    if len(backends) == 2:
        _, _, c_a, e_a, k_a = results["cython"]
        _, _, c_b, e_b, k_b = results["python"]
        assert np.array_equal(c_a, c_b) and np.array_equal(e_a, e_b) and np.array_equal(k_a, k_b)
        print("outputs byte-identical across backends\n")

    n_events = results[backends[0]][3].size
    print(f"{args.n_bits} bins, {n_events} events, best of {args.repeats} runs\n")
    print(f"{'backend':<8} {'counts [s]':>11} {'place [s]':>10} {'dead time [s]':>14} "
          f"{'total [s]':>10} {'bins/s':>12}")
    for backend in backends:
        total, timings, *_ = results[backend]
        print(f"{backend:<8} {timings['counts']:>11.3f} {timings['place']:>10.3f} "
              f"{timings['dead_time']:>14.3f} {total:>10.3f} {args.n_bits / total:>12.0f}")
    if len(backends) == 2:
        speedup = results["python"][0] / results["cython"][0]
        print(f"\ncompiled speedup: {speedup:.1f}x")


if __name__ == "__main__":
    main()
