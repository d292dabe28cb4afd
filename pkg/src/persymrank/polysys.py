"""Character sums and bilinear solution counts over GF(2) polynomials.

The +/-1 character of a product t*Y*U only ever reads the coefficient of
T^(-1), which is the parity of an AND between the packed coefficient
sequence of t and the carry-less product Y*U -- no Laurent series is
materialized anywhere.  Summing the character over all (Y, U_1..U_n) under
the degree bounds yields 2^(2n+k-rank) of the stacked matrix, and counting
solutions of the associated bilinear system ties the rank distribution to
the closed-form side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .enumeration import RankDistribution
from .persym import SequenceTuple

MAX_DEGREE = 63
EXP_SUM_MAX_N = 6
EXP_SUM_MAX_K = 10
BRUTE_BIT_BUDGET = 34


class SearchBudgetExceeded(ValueError):
    """A brute-force count was asked to sweep more bits than its budget."""


@dataclass(frozen=True)
class Poly2:
    """Polynomial over GF(2) in T, packed as a bit vector (bit i = coeff of T^i)."""

    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits.bit_length() > MAX_DEGREE + 1:
            raise ValueError(f"polynomial degree exceeds {MAX_DEGREE}")

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return self.bits.bit_length() - 1


def clmul(a: int, b: int) -> int:
    """Carry-less (GF(2)[T]) product of two packed polynomials."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def char_value(seq: int, k: int, y: Poly2, u: Poly2) -> int:
    """The +/-1 character of t*Y*U for the sequence t with coefficients ``seq``.

    ``seq`` packs the first k+1 coefficients of t (bit i-1 is the T^(-i)
    coefficient).  Returns +1 when the T^(-1) coefficient of the product is
    0 and -1 when it is 1, i.e. the parity of seq AND Y*U.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if seq < 0 or seq >> (k + 1):
        raise ValueError(f"sequence has bits beyond position {k}")
    if y.degree > k - 1:
        raise ValueError(f"deg Y = {y.degree} exceeds the bound k-1 = {k - 1}")
    if u.degree > 1:
        raise ValueError(f"deg U = {u.degree} exceeds the bound 1")
    return -1 if (seq & clmul(y.bits, u.bits)).bit_count() & 1 else 1


def exponential_sum_direct(t: SequenceTuple) -> int:
    """The character sum over all (Y, U_1..U_n) by direct summation.

    Evaluates sum over deg Y <= k-1 of the product over blocks of
    sum over deg U <= 1 of the character -- 2^k * 4^n terms, with no use of
    the rank identity, so this is the independent oracle for it.
    """
    if t.n > EXP_SUM_MAX_N or t.k > EXP_SUM_MAX_K:
        raise SearchBudgetExceeded(
            f"direct summation capped at n <= {EXP_SUM_MAX_N}, k <= {EXP_SUM_MAX_K}; "
            f"got n={t.n}, k={t.k}"
        )
    total = 0
    for y in range(1 << t.k):
        term = 1
        for seq in t.seqs:
            inner = 0
            for u in range(4):
                inner += -1 if (seq & clmul(y, u)).bit_count() & 1 else 1
            term *= inner
            if term == 0:
                break
        total += term
    return total


def count_solutions_brute(q: int, n: int, k: int) -> int:
    """Exact number of solutions of the n-row bilinear system by brute force.

    Sweeps all Y-tuples (deg Y_i <= k-1); for each, the n rows constrain
    disjoint U-variables identically, so the count over one row's
    (U^(1)..U^(q)) assignments (enumerated directly, 4^q of them) is raised
    to the n-th power.  The bit budget q*k + 2*q*n <= 34 bounds the
    equivalent full search space.
    """
    if q < 1 or n < 1 or k < 1:
        raise ValueError("q, n and k must be >= 1")
    bits = q * k + 2 * q * n
    if bits > BRUTE_BIT_BUDGET:
        raise SearchBudgetExceeded(
            f"q={q}, n={n}, k={k} spans a {bits}-bit search space; budget is {BRUTE_BIT_BUDGET} bits"
        )
    u_combos = list(product(range(4), repeat=q))
    total = 0
    for ys in product(range(1 << k), repeat=q):
        # clmul(y, u) for u in {0, 1, T, 1+T} is {0, y, y<<1, y^(y<<1)}.
        prods = [(0, y, y << 1, y ^ (y << 1)) for y in ys]
        row_solutions = 0
        for combo in u_combos:
            acc = 0
            for p, u in zip(prods, combo):
                acc ^= p[u]
            if acc == 0:
                row_solutions += 1
        total += row_solutions**n
    return total


def r_from_distribution(q: int, d: RankDistribution) -> int:
    """Solution count from a rank distribution via the weighted-sum identity.

    Evaluates 2^(q(2n+k) - (k+1)n) * sum_i counts[i] * 2^(-iq) exactly; a
    non-integral result signals a corrupted distribution.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if d.method != "exact":
        raise ValueError("solution counts require an exact distribution")
    n, k = d.n, d.k
    scale = Fraction(2) ** (q * (2 * n + k) - (k + 1) * n)
    acc = sum((c * Fraction(2) ** (-i * q) for i, c in enumerate(d.counts)), Fraction(0))
    value = scale * acc
    if value.denominator != 1:
        raise ValueError(f"non-integral solution count {value} from distribution (n={n}, k={k})")
    return int(value)


__all__ = [
    "BRUTE_BIT_BUDGET",
    "EXP_SUM_MAX_K",
    "EXP_SUM_MAX_N",
    "MAX_DEGREE",
    "Poly2",
    "SearchBudgetExceeded",
    "char_value",
    "clmul",
    "count_solutions_brute",
    "exponential_sum_direct",
    "r_from_distribution",
]
