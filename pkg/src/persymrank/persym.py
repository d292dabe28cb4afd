"""Stacked two-row persymmetric blocks built from GF(2) coefficient sequences.

A sequence (a_1, ..., a_{k+1}) yields the 2 x k block

    a_1 a_2 ... a_k
    a_2 a_3 ... a_{k+1}

whose second row is the first shifted left by one position.  An n-tuple of
sequences stacks n such blocks into a 2n x k matrix.  Sequences are packed
little-endian (bit i-1 of the word is a_i), so both block rows are just
masked shifts of the packed word.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gf2matrix import MAX_COLS, BitMatrix


@dataclass(frozen=True)
class SequenceTuple:
    """n coefficient sequences of k+1 bits each; the sweep parameter space."""

    n: int
    k: int
    seqs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.k > MAX_COLS:
            raise ValueError(f"k={self.k} exceeds the {MAX_COLS}-column limit")
        if len(self.seqs) != self.n:
            raise ValueError(f"expected {self.n} sequences, got {len(self.seqs)}")
        for j, seq in enumerate(self.seqs):
            if seq < 0 or seq >> (self.k + 1):
                raise ValueError(f"sequence {j} has bits beyond position {self.k}")


def build_block(seq: int, k: int) -> BitMatrix:
    """The 2 x k block read off one packed (k+1)-bit sequence."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if seq < 0 or seq >> (k + 1):
        raise ValueError(f"sequence has bits beyond position {k}")
    mask = (1 << k) - 1
    return BitMatrix(2, k, (seq & mask, (seq >> 1) & mask))


def build_stacked(t: SequenceTuple) -> BitMatrix:
    """The 2n x k vertical stack of the blocks of ``t``, in sequence order."""
    mask = (1 << t.k) - 1
    rows = []
    for seq in t.seqs:
        rows.append(seq & mask)
        rows.append((seq >> 1) & mask)
    return BitMatrix(2 * t.n, t.k, tuple(rows))


def tuple_from_index(idx: int, n: int, k: int) -> SequenceTuple:
    """Decode a packed sweep index into a SequenceTuple.

    Bits are assigned sequence-major and little-endian: bit
    (j-1)*(k+1) + (i-1) of ``idx`` is coefficient a_i of sequence j.
    """
    bits = n * (k + 1)
    if idx < 0 or idx >> bits:
        raise ValueError(f"index out of range [0, 2^{bits})")
    seqmask = (1 << (k + 1)) - 1
    seqs = tuple((idx >> (j * (k + 1))) & seqmask for j in range(n))
    return SequenceTuple(n, k, seqs)


def index_from_tuple(t: SequenceTuple) -> int:
    """Inverse of :func:`tuple_from_index`; round-trips exactly."""
    idx = 0
    for j, seq in enumerate(t.seqs):
        idx |= seq << (j * (t.k + 1))
    return idx


__all__ = [
    "SequenceTuple",
    "build_block",
    "build_stacked",
    "index_from_tuple",
    "tuple_from_index",
]
