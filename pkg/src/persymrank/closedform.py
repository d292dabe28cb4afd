"""Closed-form rank counts and moment identities in exact rational arithmetic.

Every formula lives as a polynomial in x = 2^k with Fraction coefficients.
The fixed-n tables (n=2, n=3, n=6) are literal transcriptions rather than
derived at load time, so a transcription typo becomes a failing cross-check
instead of silent corruption.  Each table entry carries the validity
threshold k_min stated for it; evaluation below threshold is an error
unless explicitly overridden, because the polynomials are simply wrong
there (e.g. the n=6 rank-2 form at k=2 disagrees with the true count).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .enumeration import RankDistribution


class BelowValidityError(ValueError):
    """Requested a closed form below its stated validity threshold."""


class NonIntegralResultError(ValueError):
    """A rational evaluation that must be integral was not (transcription bug)."""


class BelowValidityWarning(UserWarning):
    """Emitted when a below-threshold evaluation is forced via override."""


class ExpPoly:
    """Polynomial in x = 2^k with exact rational coefficients.

    Immutable in practice: all arithmetic returns new instances and zero
    coefficients are never stored.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, int | Fraction] | None = None):
        clean: dict[int, Fraction] = {}
        for exp, c in (coeffs or {}).items():
            if not isinstance(exp, int) or exp < 0:
                raise ValueError(f"exponent {exp!r} must be a non-negative integer")
            frac = Fraction(c)
            if frac != 0:
                clean[exp] = frac
        self._coeffs = clean

    @classmethod
    def const(cls, value: int | Fraction) -> "ExpPoly":
        return cls({0: value})

    @classmethod
    def monomial(cls, coeff: int | Fraction, exp: int) -> "ExpPoly":
        return cls({exp: coeff})

    def coefficient(self, exp: int) -> Fraction:
        return self._coeffs.get(exp, Fraction(0))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self._coeffs)

    @property
    def degree(self) -> int:
        """Degree in x; -1 for the zero polynomial."""
        return max(self._coeffs, default=-1)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        out = dict(self._coeffs)
        for exp, c in other._coeffs.items():
            out[exp] = out.get(exp, Fraction(0)) + c
        return ExpPoly(out)

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + (-other)

    def __neg__(self) -> "ExpPoly":
        return ExpPoly({e: -c for e, c in self._coeffs.items()})

    def __mul__(self, other: "ExpPoly | int | Fraction") -> "ExpPoly":
        if isinstance(other, (int, Fraction)):
            return ExpPoly({e: c * other for e, c in self._coeffs.items()})
        out: dict[int, Fraction] = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + c1 * c2
        return ExpPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self._coeffs.items()))

    def evaluate(self, k: int) -> Fraction:
        """Exact value at x = 2^k."""
        return sum((c * Fraction(2) ** (e * k) for e, c in self._coeffs.items()), Fraction(0))

    def evaluate_int(self, k: int) -> int:
        value = self.evaluate(k)
        if value.denominator != 1:
            raise NonIntegralResultError(f"value {value} at k={k} is not an integer")
        return int(value)

    def __repr__(self) -> str:
        if not self._coeffs:
            return "0"
        terms = []
        for exp in sorted(self._coeffs, reverse=True):
            c = self._coeffs[exp]
            if exp == 0:
                terms.append(f"{c}")
            elif exp == 1:
                terms.append(f"{c}*x")
            else:
                terms.append(f"{c}*x^{exp}")
        return " + ".join(terms).replace("+ -", "- ")


@dataclass(frozen=True)
class FamilyEntry:
    poly: ExpPoly
    k_min: int


@dataclass(frozen=True)
class ClosedFormFamily:
    """A table mapping rank i to its count polynomial and validity threshold."""

    name: str
    entries: Mapping[int, FamilyEntry]

    def ranks(self) -> tuple[int, ...]:
        return tuple(sorted(self.entries))

    def entry(self, i: int) -> FamilyEntry:
        if i not in self.entries:
            raise ValueError(f"family {self.name!r} has no rank-{i} entry")
        return self.entries[i]

    def value(self, i: int, k: int, *, allow_below_validity: bool = False) -> int:
        entry = self.entry(i)
        if k < entry.k_min:
            if not allow_below_validity:
                raise BelowValidityError(
                    f"{self.name} rank {i} is stated for k >= {entry.k_min}, got k={k} "
                    "(pass allow_below_validity to evaluate anyway)"
                )
            warnings.warn(
                f"evaluating {self.name} rank {i} at k={k} below its stated range k >= {entry.k_min}",
                BelowValidityWarning,
                stacklevel=2,
            )
        return entry.poly.evaluate_int(k)


def _entry(k_min: int, coeffs: Mapping[int, int | Fraction]) -> FamilyEntry:
    return FamilyEntry(ExpPoly(coeffs), k_min)


# --------------------------------------------------------------------------
# General-n closed forms, ranks 0..7
# --------------------------------------------------------------------------

def general_family(n: int) -> ClosedFormFamily:
    """Closed forms for ranks 0..7 of the 2n x k stack, any n >= 1.

    Coefficients are polynomials in 2^n with fixed rational prefactors; the
    prefactors always cancel to integers (checked at evaluation time).
    Validity thresholds follow the k >= i+1 pattern, except that the
    full-rank line i = 2n holds from k = 2n (it coincides with the
    full-rank product), matching the fixed-n tables.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    y = Fraction(2) ** n
    entries = {
        0: _entry(1, {0: 1}),
        1: _entry(2, {0: 3 * (y - 1)}),
        2: _entry(3, {1: 2 * y - 2, 0: 7 * y**2 - 25 * y + 18}),
        3: _entry(4, {
            1: 7 * y**2 - 21 * y + 14,
            0: 15 * y**3 - 133 * y**2 + 294 * y - 176,
        }),
        4: _entry(5, {
            2: Fraction(1, 3) * (2 * y**2 - 6 * y + 4),
            1: Fraction(1, 6) * (105 * y**3 - 783 * y**2 + 1614 * y - 936),
            0: Fraction(1, 6) * (186 * y**4 - 3630 * y**3 + 19028 * y**2 - 34464 * y + 18880),
        }),
        5: _entry(6, {
            2: Fraction(1, 2) * (5 * y**3 - 35 * y**2 + 70 * y - 40),
            1: Fraction(1, 4) * (155 * y**4 - 2565 * y**3 + 12530 * y**2 - 21960 * y + 11840),
            0: 63 * y**5 - 2573 * y**4 + 29150 * y**3 - 123760 * y**2 + 203872 * y - 106752,
        }),
        6: _entry(7, {
            3: Fraction(1, 21) * (y**3 - 7 * y**2 + 14 * y - 8),
            2: Fraction(1, 168) * (1085 * y**4 - 16723 * y**3 + 79086 * y**2 - 136472 * y + 73024),
            1: Fraction(1, 168) * (13671 * y**5 - 475881 * y**4 + 5026378 * y**3
                                   - 20647816 * y**2 + 33473216 * y - 17389568),
            0: Fraction(1, 168) * (21336 * y**6 - 1781640 * y**5 + 41896624 * y**4
                                   - 382091648 * y**3 + 1470524160 * y**2
                                   - 2311493632 * y + 1182924800),
        }),
        7: _entry(8, {
            3: Fraction(31, 168) * (y**4 - 15 * y**3 + 70 * y**2 - 120 * y + 64),
            2: Fraction(1, 96) * (1395 * y**5 - 45229 * y**4 + 462210 * y**3
                                  - 1868680 * y**2 + 3005760 * y - 1555456),
            1: Fraction(1, 48) * (8001 * y**6 - 571023 * y**5 + 12524806 * y**4
                                  - 110524920 * y**3 + 418606144 * y**2
                                  - 652818432 * y + 332775424),
            0: Fraction(1, 21) * (5355 * y**7 - 904113 * y**6 + 43302294 * y**5
                                  - 817168432 * y**4 + 6743660640 * y**3
                                  - 96649567 * 2**8 * y**2 + 4637778 * 2**13 * y
                                  - 293263 * 2**16),
        }),
    }
    if 2 * n in entries:
        full = entries[2 * n]
        entries[2 * n] = FamilyEntry(full.poly, 2 * n)
    return ClosedFormFamily(f"general(n={n})", entries)


# --------------------------------------------------------------------------
# Fixed-n literal tables
# --------------------------------------------------------------------------

# Double persymmetric stack (n=2), ranks 0..4.
N2_FAMILY = ClosedFormFamily("n2", {
    0: _entry(1, {0: 1}),
    1: _entry(2, {0: 9}),
    2: _entry(3, {1: 6, 0: 30}),
    3: _entry(4, {1: 42, 0: -168}),
    4: _entry(4, {2: 4, 1: -48, 0: 128}),
})

# Triple persymmetric stack (n=3), ranks 0..6.  Only the rank-6 threshold is
# stated explicitly; the others follow the k >= i+1 pattern of the general
# family.
N3_FAMILY = ClosedFormFamily("n3", {
    0: _entry(1, {0: 1}),
    1: _entry(2, {0: 21}),
    2: _entry(3, {1: 14, 0: 266}),
    3: _entry(4, {1: 294, 0: 1344}),
    4: _entry(5, {2: 28, 1: 2604, 0: -22624}),
    5: _entry(6, {2: 420, 1: -10080, 0: 53760}),
    6: _entry(6, {3: 8, 2: -448, 1: 7168, 0: -32768}),
})

# Sextuple persymmetric stack (n=6), ranks 0..12.
N6_FAMILY = ClosedFormFamily("n6", {
    0: _entry(1, {0: 1}),
    1: _entry(2, {0: 189}),
    2: _entry(3, {1: 126, 0: 27090}),
    3: _entry(4, {1: 27342, 0: 3406032}),
    4: _entry(5, {2: 2604, 1: 4070052, 0: 374121888}),
    5: _entry(6, {2: 585900, 1: 494499600, 0: 123537015 * 2**8}),
    6: _entry(7, {3: 11160, 2: 84135240, 1: 2**8 * 184392495, 0: 29391255 * 2**15}),
    7: _entry(8, {3: 2421720, 2: 277589655 * 2**5, 1: 2431729125 * 2**10,
                  0: -2996595315 * 2**16}),
    8: _entry(9, {4: 10416, 3: 216944 * 1395, 2: 2155757205 * 2**8,
                  1: -6999385995 * 2**14, 0: 4767802914 * 2**20}),
    9: _entry(10, {4: 1968624, 3: 15196608 * 1395, 2: -2387571795 * 2**12,
                   1: 4814516070 * 2**18, 0: -2760151464 * 2**24}),
    10: _entry(11, {5: 2016, 4: 2016 * 81685, 3: 2016 * -79052480,
                    2: 2016 * 2**13 * 2888735, 1: 2016 * -1239163 * 2**21,
                    0: 2016 * 2**30 * 82645}),
    11: _entry(12, {5: 256032, 4: 256032 * -1984, 3: 256032 * 1269760,
                    2: 256032 * -325058560, 1: 256032 * 31744 * 2**20,
                    0: 256032 * -(2**40)}),
    12: _entry(12, {6: 2**6, 5: 2**6 * -63 * 2**6, 4: 2**6 * 651 * 2**13,
                    3: 2**6 * -1395 * 2**21, 2: 2**6 * 651 * 2**30,
                    1: 2**6 * -63 * 2**40, 0: 2**6 * 2**51}),
})

TABLE_FAMILIES: dict[str, ClosedFormFamily] = {
    "n2": N2_FAMILY,
    "n3": N3_FAMILY,
    "n6": N6_FAMILY,
}

# Independently reported k=6 column for the sextuple stack (ranks 0..6; all
# higher ranks count zero matrices at k=6).  Verification targets, not
# formulas: the n6 table is diffed against these.
N6_K6_REFERENCE_COLUMN: dict[int, int] = {
    0: 1,
    1: 189,
    2: 35154,
    3: 5155920,
    4: 645271200,
    5: 256536315 * 2**8,
    6: 2**14 * 264387375,
}


def gamma_general(n: int, i: int, k: int, *, allow_below_validity: bool = False) -> int:
    """Count of rank-i stacks by the general-n closed form (ranks 0..7)."""
    return general_family(n).value(i, k, allow_below_validity=allow_below_validity)


def gamma_table(family: str, i: int, k: int, *, allow_below_validity: bool = False) -> int:
    """Count of rank-i stacks from one of the literal tables (n2 | n3 | n6)."""
    if family not in TABLE_FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {sorted(TABLE_FAMILIES)}")
    return TABLE_FAMILIES[family].value(i, k, allow_below_validity=allow_below_validity)


# --------------------------------------------------------------------------
# Full-rank product and moments
# --------------------------------------------------------------------------

def full_rank_count(n: int, k: int) -> int:
    """The rank-2n product count 2^n * prod_{j=1..n} (2^k - 2^(2n-j)).

    Returns the literal product; it vanishes whenever some factor does
    (n <= k <= 2n-1) and is only meaningful as a count for k >= n.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    value = 2**n
    for j in range(1, n + 1):
        value *= 2**k - 2 ** (2 * n - j)
    return value


def full_rank_poly(n: int) -> ExpPoly:
    """The full-rank product expanded into a polynomial in x."""
    poly = ExpPoly.const(2**n)
    for j in range(1, n + 1):
        poly = poly * ExpPoly({1: 1, 0: -(2 ** (2 * n - j))})
    return poly


def moment_lhs(d: RankDistribution, s: int) -> int:
    """Scaled s-th inverse-rank moment of an exact distribution.

    Computes sum_i counts[i] * 2^((2n-i)s), the s-th moment multiplied
    through by 2^(2ns) so everything stays integral.
    """
    if d.method != "exact":
        raise ValueError("moments are only defined for exact distributions")
    if s not in (0, 1, 2):
        raise ValueError("s must be 0, 1 or 2")
    return sum(c * 2 ** ((2 * d.n - i) * s) for i, c in enumerate(d.counts))


def _pow2(e: int) -> Fraction:
    return Fraction(2) ** e


def moment_rhs(n: int, k: int, s: int) -> int:
    """Closed-form value of the scaled s-th moment for a full sweep at (n, k)."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    if s == 0:
        return 2 ** ((k + 1) * n)
    if s == 1:
        total = _pow2(n + k * (n - 1)) + _pow2((k - 1) * n) - _pow2((k - 1) * n - k)
        scaled = _pow2(2 * n) * total
    elif s == 2:
        total = (
            _pow2(n + k * (n - 2))
            + _pow2(-n + k * (n - 2)) * (3 * _pow2(k) - 3)
            + _pow2(-2 * n + k * (n - 2)) * (6 * _pow2(k - 1) - 6)
            + _pow2(-3 * n + k * n)
            - 6 * _pow2(n * (k - 3) - k)
            + 8 * _pow2(-3 * n + k * (n - 2))
        )
        scaled = _pow2(4 * n) * total
    else:
        raise ValueError("s must be 0, 1 or 2")
    if scaled.denominator != 1:
        raise NonIntegralResultError(f"moment rhs (n={n}, k={k}, s={s}) = {scaled} is not integral")
    return int(scaled)


def n6_moment_poly(s: int) -> ExpPoly:
    """The scaled n=6 moment identities as literal polynomials in x.

    s=0: 64 x^6;  s=1: 64 x^6 + 262080 x^5;
    s=2: 64 x^6 + 798336 x^5 + 1072931328 x^4.
    """
    if s == 0:
        return ExpPoly({6: 64})
    if s == 1:
        return ExpPoly({6: 64, 5: 262080})
    if s == 2:
        return ExpPoly({6: 64, 5: 798336, 4: 1072931328})
    raise ValueError("s must be 0, 1 or 2")


def q1_solution_count(n: int, k: int) -> int:
    """Solutions of the single-row bilinear system: 2^(2n) + 2^k - 1."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    return 2 ** (2 * n) + 2**k - 1


# --------------------------------------------------------------------------
# Table emission
# --------------------------------------------------------------------------

def table_rows(
    family: str | ClosedFormFamily,
    ks: Iterable[int],
    *,
    ranks: Iterable[int] | None = None,
    include_below_validity: bool = False,
) -> list[dict]:
    """Rows {family, i, k, value, in_range} for CSV/JSON emission.

    Below-threshold rows are omitted unless ``include_below_validity`` is
    set, in which case they are emitted with in_range=False.
    """
    fam = TABLE_FAMILIES[family] if isinstance(family, str) else family
    wanted = tuple(ranks) if ranks is not None else fam.ranks()
    rows = []
    for k in ks:
        for i in wanted:
            entry = fam.entry(i)
            in_range = k >= entry.k_min
            if not in_range and not include_below_validity:
                continue
            rows.append({
                "family": fam.name,
                "i": i,
                "k": k,
                "value": str(entry.poly.evaluate_int(k)),
                "in_range": in_range,
            })
    return rows


__all__ = [
    "BelowValidityError",
    "BelowValidityWarning",
    "ClosedFormFamily",
    "ExpPoly",
    "FamilyEntry",
    "N2_FAMILY",
    "N3_FAMILY",
    "N6_FAMILY",
    "N6_K6_REFERENCE_COLUMN",
    "NonIntegralResultError",
    "TABLE_FAMILIES",
    "full_rank_count",
    "full_rank_poly",
    "gamma_general",
    "gamma_table",
    "general_family",
    "moment_lhs",
    "moment_rhs",
    "n6_moment_poly",
    "q1_solution_count",
    "table_rows",
]
