from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from persymrank.gf2matrix import from_rows, rank, rank_words

from conftest import naive_rank, unpack


class TestFromRows:
    def test_empty_matrix(self):
        m = from_rows([], 5)
        assert (m.rows, m.cols) == (0, 5)
        assert m.row_bits == ()

    def test_duplicate_rows(self):
        m = from_rows([0b101, 0b101], 3)
        assert (m.rows, m.cols) == (2, 3)
        assert m.row_bits == (0b101, 0b101)

    def test_permuted_identity(self):
        m = from_rows([0b1, 0b10], 2)
        assert m.row_bits == (0b1, 0b10)

    def test_rejects_bit_beyond_cols(self):
        with pytest.raises(ValueError, match="column"):
            from_rows([0b100], 2)

    def test_rejects_negative_row(self):
        with pytest.raises(ValueError):
            from_rows([-1], 3)

    def test_rejects_cols_beyond_word(self):
        with pytest.raises(ValueError):
            from_rows([0], 64)


class TestRank:
    def test_zero_matrix(self):
        assert rank(from_rows([0] * 12, 6)) == 0

    def test_duplicated_row(self):
        assert rank(from_rows([0b101, 0b101], 3)) == 1

    def test_disjoint_pivots(self):
        assert rank(from_rows([0b001, 0b100], 3)) == 2

    def test_input_unmodified(self):
        words = [0b11, 0b01, 0b10]
        m = from_rows(words, 2)
        rank(m)
        assert m.row_bits == (0b11, 0b01, 0b10)

    def test_exhaustive_2x2_and_2x3_vs_oracle(self):
        for cols in (2, 3):
            for a in range(1 << cols):
                for b in range(1 << cols):
                    m = from_rows([a, b], cols)
                    assert rank(m) == naive_rank(unpack(m)), (a, b, cols)

    def test_scratch_reuse(self):
        scratch: list[int] = []
        assert rank_words([0b101, 0b011, 0b110], scratch) == 2
        assert rank_words([0b1, 0b10, 0b100], scratch) == 3
        assert rank_words([], scratch) == 0


@st.composite
def packed_matrices(draw, max_rows=8, max_cols=8):
    rows = draw(st.integers(0, max_rows))
    cols = draw(st.integers(1, max_cols))
    words = draw(st.lists(st.integers(0, (1 << cols) - 1), min_size=rows, max_size=rows))
    return from_rows(words, cols)


@given(packed_matrices())
def test_rank_matches_oracle(m):
    assert rank(m) == naive_rank(unpack(m))


@given(packed_matrices())
def test_rank_bounded_by_dimensions(m):
    assert 0 <= rank(m) <= min(m.rows, m.cols)


@given(packed_matrices(max_rows=6), st.data())
def test_rank_invariant_under_row_swap(m, data):
    if m.rows < 2:
        return
    i = data.draw(st.integers(0, m.rows - 1))
    j = data.draw(st.integers(0, m.rows - 1))
    words = list(m.row_bits)
    words[i], words[j] = words[j], words[i]
    assert rank(from_rows(words, m.cols)) == rank(m)


@given(packed_matrices(max_rows=6), st.data())
def test_rank_invariant_under_row_addition(m, data):
    if m.rows < 2:
        return
    i = data.draw(st.integers(0, m.rows - 1))
    j = data.draw(st.integers(0, m.rows - 1).filter(lambda x: x != i))
    words = list(m.row_bits)
    words[j] ^= words[i]
    assert rank(from_rows(words, m.cols)) == rank(m)
