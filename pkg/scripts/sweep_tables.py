#!/usr/bin/env python3
"""Sweep small (n, k) grids and print enumerated counts next to the closed forms.

Example:
    python scripts/sweep_tables.py --n 3 --k-max 6
"""

from __future__ import annotations

import argparse

from persymrank.closedform import TABLE_FAMILIES, general_family
from persymrank.enumeration import enumerate_exact


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--k-max", type=int, default=6)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    family = TABLE_FAMILIES.get(f"n{args.n}") or general_family(args.n)
    print(f"n={args.n}: enumerated counts vs closed forms ({family.name})")
    for k in range(1, args.k_max + 1):
        dist = enumerate_exact(args.n, k, args.workers)
        print(f"\nk={k}  (2^{args.n * (k + 1)} tuples, total {dist.total})")
        for i, count in enumerate(dist.counts):
            if i in family.entries and k >= family.entry(i).k_min:
                formula = family.value(i, k)
                mark = "ok" if formula == count else f"MISMATCH (formula {formula})"
            else:
                mark = "-"
            print(f"  rank {i:2d}: {count:>14d}   {mark}")


if __name__ == "__main__":
    main()
