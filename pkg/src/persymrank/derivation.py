"""Re-derivation of the n=6 high-rank count polynomials from first principles.

The rank-i counts for i = 7..12 are postulated to factor as
prod_{e=6}^{i-1} (x - 2^e) times a residual polynomial of prescribed degree
(2, 2, 1, 1, 0, 0 for i = 7..12).  Fixing the rank-7 form from the general
family and the rank-12 form from the full-rank product leaves 8 residual
coefficients.  Matching powers of x in the three scaled moment identities
gives 21 linear equations over the rationals; the system is solved by
fraction-free (Bareiss-style) elimination over big integers with a rational
back-substitution, keeping every redundant equation as a consistency check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .closedform import ExpPoly, N6_FAMILY, full_rank_poly, general_family, n6_moment_poly

N = 6
MAX_RANK = 2 * N


class InconsistentSystemError(ValueError):
    """The assembled equations contradict each other (a transcription bug)."""


class UnderdeterminedSystemError(ValueError):
    """The assembled equations do not pin every residual coefficient."""


@dataclass(frozen=True)
class FactoredShape:
    """The postulated factored form of one high-rank count polynomial."""

    rank: int
    factor_exponents: tuple[int, ...]
    residual_degree: int
    fixed: bool  # residual determined by a known closed form, not solved for

    def factor_poly(self) -> ExpPoly:
        poly = ExpPoly.const(1)
        for e in self.factor_exponents:
            poly = poly * ExpPoly({1: 1, 0: -(2**e)})
        return poly

    def unknown_labels(self) -> tuple[str, ...]:
        if self.fixed:
            return ()
        return tuple(f"g{self.rank}_x{d}" for d in range(self.residual_degree, -1, -1))


ANSATZ_SHAPES: dict[int, FactoredShape] = {
    i: FactoredShape(
        rank=i,
        factor_exponents=tuple(range(6, 6 + (i - 7) + 1)),
        residual_degree={7: 2, 8: 2, 9: 1, 10: 1, 11: 0, 12: 0}[i],
        fixed=i in (7, 12),
    )
    for i in range(7, 13)
}


@dataclass(frozen=True)
class LinearSystemQ:
    """Exact rational linear system: matrix @ unknowns = rhs, row per equation."""

    matrix: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    unknowns: tuple[str, ...]
    equations: tuple[str, ...]

    @property
    def n_equations(self) -> int:
        return len(self.matrix)

    @property
    def n_unknowns(self) -> int:
        return len(self.unknowns)


def known_low_rank_polys() -> dict[int, ExpPoly]:
    """Rank 0..7 count polynomials from the general family at n=6."""
    fam = general_family(N)
    return {i: fam.entry(i).poly for i in range(8)}


def assemble_system() -> LinearSystemQ:
    """Build the moment-matching equations for the rank 8..11 residuals.

    For each s in {0, 1, 2} the identity
        sum_i count_i(x) * 2^((12-i)s) = moment_poly_s(x)
    is required to hold coefficient-by-coefficient in x (powers 0..6), with
    ranks 0..7 and 12 substituted from their known forms.
    """
    known = known_low_rank_polys()
    known[MAX_RANK] = full_rank_poly(N)

    unknowns: list[str] = []
    columns: list[tuple[int, int]] = []  # (rank, residual power) per unknown
    for i in range(8, 12):
        shape = ANSATZ_SHAPES[i]
        unknowns.extend(shape.unknown_labels())
        columns.extend((i, d) for d in range(shape.residual_degree, -1, -1))

    rows: list[tuple[Fraction, ...]] = []
    rhs: list[Fraction] = []
    labels: list[str] = []
    for s in range(3):
        residual_rhs = n6_moment_poly(s)
        for i, poly in known.items():
            residual_rhs = residual_rhs - poly * Fraction(2) ** ((MAX_RANK - i) * s)
        column_polys = [
            ANSATZ_SHAPES[i].factor_poly()
            * ExpPoly({d: 1})
            * Fraction(2) ** ((MAX_RANK - i) * s)
            for i, d in columns
        ]
        for power in range(MAX_RANK // 2 + 1):
            rows.append(tuple(cp.coefficient(power) for cp in column_polys))
            rhs.append(residual_rhs.coefficient(power))
            labels.append(f"s={s},x^{power}")

    return LinearSystemQ(tuple(rows), tuple(rhs), tuple(unknowns), tuple(labels))


def solve_exact(system: LinearSystemQ) -> dict[str, Fraction]:
    """Unique exact solution of an (over-determined) rational system.

    Fraction-free forward elimination over integers, rational
    back-substitution, then every original equation is re-checked against
    the solution; failures name the offending equations.
    """
    m, n = system.n_equations, system.n_unknowns
    # Scale each row to integers so the Bareiss divisions stay exact.
    aug: list[list[int]] = []
    for r in range(m):
        entries = list(system.matrix[r]) + [system.rhs[r]]
        lcm = 1
        for e in entries:
            lcm = lcm * e.denominator // _gcd(lcm, e.denominator)
        aug.append([int(e * lcm) for e in entries])
    origin = list(range(m))

    pivots: list[tuple[int, int]] = []  # (row, column)
    prev = 1
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        origin[r], origin[p] = origin[p], origin[r]
        for i in range(r + 1, m):
            for j in range(c + 1, n + 1):
                q, rem = divmod(aug[r][c] * aug[i][j] - aug[i][c] * aug[r][j], prev)
                if rem:
                    raise AssertionError("fraction-free elimination lost exactness")
                aug[i][j] = q
            aug[i][c] = 0
        prev = aug[r][c]
        pivots.append((r, c))
        r += 1

    # Rows below the pivot rank are zero in every column by construction, so
    # a nonzero right-hand side there is an outright contradiction; report
    # that before any rank deficiency.
    bad = [origin[i] for i in range(r, m) if aug[i][n] != 0]
    if bad:
        raise InconsistentSystemError(
            f"inconsistent system: equations {[system.equations[i] for i in bad]} are unsatisfiable"
        )
    if r < n:
        solved = {c for _, c in pivots}
        free = [system.unknowns[c] for c in range(n) if c not in solved]
        raise UnderdeterminedSystemError(f"underdetermined system: free unknowns {free}")

    values: dict[int, Fraction] = {}
    for row, col in reversed(pivots):
        acc = Fraction(aug[row][n])
        for j in range(col + 1, n):
            acc -= aug[row][j] * values[j]
        values[col] = acc / aug[row][col]

    solution = {system.unknowns[c]: values[c] for c in range(n)}
    mismatched = [
        system.equations[i]
        for i in range(m)
        if sum(system.matrix[i][c] * values[c] for c in range(n)) != system.rhs[i]
    ]
    if mismatched:
        raise InconsistentSystemError(f"solution violates equations {mismatched}")
    return solution


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def derived_polys(assignment: dict[str, Fraction]) -> dict[int, ExpPoly]:
    """Expanded count polynomials for ranks 7..12 under a solved assignment."""
    known = known_low_rank_polys()
    out: dict[int, ExpPoly] = {7: known[7], MAX_RANK: full_rank_poly(N)}
    for i in range(8, 12):
        shape = ANSATZ_SHAPES[i]
        residual = ExpPoly({
            d: assignment[f"g{i}_x{d}"] for d in range(shape.residual_degree + 1)
        })
        out[i] = shape.factor_poly() * residual
    return out


@dataclass(frozen=True)
class ComparisonReport:
    """Coefficient-level diff of the derived family against the stored table.

    ``diffs[i][power] = (derived, stored)`` for every mismatching
    coefficient; an empty report means exact reproduction.
    """

    diffs: dict[int, dict[int, tuple[Fraction, Fraction]]]

    def is_empty(self) -> bool:
        return not self.diffs

    def to_json_dict(self) -> dict:
        return {
            str(i): {
                f"x^{power}": {"derived": str(d), "stored": str(p)}
                for power, (d, p) in sorted(powers.items())
            }
            for i, powers in sorted(self.diffs.items())
        }


def expand_and_compare(assignment: dict[str, Fraction]) -> ComparisonReport:
    """Diff the derived rank 7..12 polynomials against the stored table."""
    derived = derived_polys(assignment)
    diffs: dict[int, dict[int, tuple[Fraction, Fraction]]] = {}
    for i, poly in derived.items():
        stored = N6_FAMILY.entry(i).poly
        delta = poly - stored
        if not delta.is_zero():
            diffs[i] = {
                power: (poly.coefficient(power), stored.coefficient(power))
                for power in delta.as_dict()
            }
    return ComparisonReport(diffs)


def derive() -> tuple[dict[str, Fraction], dict[int, ExpPoly], ComparisonReport]:
    """Assemble, solve and compare in one step."""
    assignment = solve_exact(assemble_system())
    return assignment, derived_polys(assignment), expand_and_compare(assignment)


__all__ = [
    "ANSATZ_SHAPES",
    "ComparisonReport",
    "FactoredShape",
    "InconsistentSystemError",
    "LinearSystemQ",
    "UnderdeterminedSystemError",
    "assemble_system",
    "derive",
    "derived_polys",
    "expand_and_compare",
    "known_low_rank_polys",
    "solve_exact",
]
