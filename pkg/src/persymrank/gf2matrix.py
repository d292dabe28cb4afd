"""Dense GF(2) matrices as int bitsets, with exact rank computation.

Every matrix handled here has at most a few dozen rows and at most 63
columns, so a whole row fits in one machine word and rank reduces to a
handful of shift/xor operations per row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

MAX_COLS = 63


@dataclass(frozen=True)
class BitMatrix:
    """Matrix over GF(2); bit j of ``row_bits[i]`` is the entry at (i, j)."""

    rows: int
    cols: int
    row_bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if self.cols > MAX_COLS:
            raise ValueError(f"cols={self.cols} exceeds the {MAX_COLS}-column row-per-word limit")
        if len(self.row_bits) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.row_bits)}")
        mask = (1 << self.cols) - 1
        for i, row in enumerate(self.row_bits):
            if row < 0 or row & ~mask:
                raise ValueError(f"row {i} has a set bit at column >= {self.cols}")


def from_rows(row_bits: Sequence[int], cols: int) -> BitMatrix:
    """Build a BitMatrix from packed rows, rejecting bits beyond ``cols``."""
    return BitMatrix(len(row_bits), cols, tuple(row_bits))


def rank_words(words: Sequence[int], scratch: list[int] | None = None) -> int:
    """Rank of packed GF(2) rows via elimination with lowest-set-bit pivots.

    ``words`` is never modified.  Callers on a hot path can pass a reusable
    ``scratch`` list to avoid per-call allocation; it is overwritten.
    """
    if scratch is None:
        scratch = list(words)
    else:
        scratch[:] = words
    rank = 0
    for i in range(len(scratch)):
        row = scratch[i]
        if row == 0:
            continue
        pivot = row & -row
        rank += 1
        for j in range(i + 1, len(scratch)):
            if scratch[j] & pivot:
                scratch[j] ^= row
    return rank


def rank(m: BitMatrix) -> int:
    """GF(2) row rank of ``m``.  Pure; the input is unmodified."""
    return rank_words(m.row_bits)


__all__ = ["MAX_COLS", "BitMatrix", "from_rows", "rank", "rank_words"]
