#!/usr/bin/env python3
"""Measure sweep throughput (ranks per second) across stack shapes.

Example:
    python scripts/bench_throughput.py --budget-bits 26
"""

from __future__ import annotations

import argparse
import time

from persymrank.enumeration import enumerate_exact_range


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget-bits", type=int, default=24,
                    help="sweep at most 2^bits indices per shape")
    args = ap.parse_args()

    enumerate_exact_range(1, 1, 0, 4)  # compile outside the timed region
    print(f"{'n':>2} {'k':>2} {'swept':>12} {'seconds':>8} {'Mranks/s':>9}")
    for n, k in [(1, 4), (2, 4), (3, 4), (6, 2), (6, 3), (6, 4), (6, 5)]:
        bits = min(n * (k + 1), args.budget_bits)
        stop = 1 << bits
        t0 = time.perf_counter()
        enumerate_exact_range(n, k, 0, stop)
        dt = time.perf_counter() - t0
        print(f"{n:>2} {k:>2} {stop:>12} {dt:>8.2f} {stop / dt / 1e6:>9.1f}")


if __name__ == "__main__":
    main()
