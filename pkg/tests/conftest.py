"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately take a different route from the package:
rank is recomputed by column-major Gauss-Jordan on unpacked 0/1 entries,
and distributions are re-tallied by a plain Python sweep through the
decoded tuples.  Any divergence between the two routes is a bug.
"""

from __future__ import annotations

import pytest
from hypothesis import settings

from persymrank.gf2matrix import BitMatrix
from persymrank.persym import build_stacked, tuple_from_index

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


def unpack(matrix: BitMatrix) -> list[list[int]]:
    """BitMatrix entries as a list of 0/1 rows."""
    return [[(row >> j) & 1 for j in range(matrix.cols)] for row in matrix.row_bits]


def naive_rank(rows: list[list[int]]) -> int:
    """GF(2) rank by column-major Gauss-Jordan on unpacked entries."""
    m = [row[:] for row in rows]
    if not m:
        return 0
    rank = 0
    pivot_row = 0
    for c in range(len(m[0])):
        hit = next((r for r in range(pivot_row, len(m)) if m[r][c]), None)
        if hit is None:
            continue
        m[pivot_row], m[hit] = m[hit], m[pivot_row]
        for r in range(len(m)):
            if r != pivot_row and m[r][c]:
                m[r] = [(a + b) % 2 for a, b in zip(m[r], m[pivot_row])]
        pivot_row += 1
        rank += 1
    return rank


def naive_rank_distribution(n: int, k: int) -> list[int]:
    """Rank tallies over the whole tuple space, via the naive rank."""
    counts = [0] * (min(2 * n, k) + 1)
    for idx in range(1 << (n * (k + 1))):
        m = build_stacked(tuple_from_index(idx, n, k))
        counts[naive_rank(unpack(m))] += 1
    return counts


@pytest.fixture(scope="session")
def shared_cache(tmp_path_factory):
    """One cache directory per session so the heavy sweeps run once."""
    return tmp_path_factory.mktemp("rankcache")
