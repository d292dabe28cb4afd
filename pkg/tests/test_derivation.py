from __future__ import annotations

from fractions import Fraction

import pytest

from persymrank.closedform import ExpPoly, N6_FAMILY, full_rank_poly, n6_moment_poly
from persymrank.derivation import (
    ANSATZ_SHAPES,
    InconsistentSystemError,
    LinearSystemQ,
    UnderdeterminedSystemError,
    assemble_system,
    derive,
    derived_polys,
    expand_and_compare,
    known_low_rank_polys,
    solve_exact,
)


def divide_exactly(poly: ExpPoly, factor: ExpPoly) -> ExpPoly:
    """Long division, asserting a zero remainder; test-local helper."""
    remainder = poly
    quotient = ExpPoly()
    lead_exp = factor.degree
    lead_coeff = factor.coefficient(lead_exp)
    while remainder.degree >= lead_exp:
        exp = remainder.degree
        coeff = remainder.coefficient(exp) / lead_coeff
        term = ExpPoly({exp - lead_exp: coeff})
        quotient = quotient + term
        remainder = remainder - term * factor
    assert remainder.is_zero(), "division left a remainder"
    return quotient


class TestAnsatzShapes:
    def test_factor_ranges(self):
        assert ANSATZ_SHAPES[7].factor_exponents == (6,)
        assert ANSATZ_SHAPES[12].factor_exponents == (6, 7, 8, 9, 10, 11)

    def test_residual_degrees(self):
        assert [ANSATZ_SHAPES[i].residual_degree for i in range(7, 13)] == [2, 2, 1, 1, 0, 0]

    def test_total_unknowns_before_fixing(self):
        assert sum(s.residual_degree + 1 for s in ANSATZ_SHAPES.values()) == 12

    def test_total_degree_matches_postulated_shape(self):
        degrees = {7: 3, 8: 4, 9: 4, 10: 5, 11: 5, 12: 6}
        for i, shape in ANSATZ_SHAPES.items():
            assert len(shape.factor_exponents) + shape.residual_degree == degrees[i]


class TestAssemble:
    def test_dimensions(self):
        system = assemble_system()
        assert system.n_unknowns == 8
        assert system.n_equations == 21
        assert system.unknowns == (
            "g8_x2", "g8_x1", "g8_x0", "g9_x1", "g9_x0", "g10_x1", "g10_x0", "g11_x0",
        )

    def test_stored_table_values_balance_every_equation(self):
        # Residuals recovered from the stored table by exact division.
        system = assemble_system()
        stored: dict[str, Fraction] = {}
        for i in range(8, 12):
            shape = ANSATZ_SHAPES[i]
            residual = divide_exactly(N6_FAMILY.entry(i).poly, shape.factor_poly())
            assert residual.degree == shape.residual_degree
            for d in range(shape.residual_degree + 1):
                stored[f"g{i}_x{d}"] = residual.coefficient(d)
        for row, rhs, label in zip(system.matrix, system.rhs, system.equations):
            lhs = sum(
                coeff * stored[u] for coeff, u in zip(row, system.unknowns)
            )
            assert lhs == rhs, label

    def test_s0_identity_targets_64_x6(self):
        # The s=0 equations match coefficients of sum_i count_i(x) = 64 x^6.
        assert n6_moment_poly(0) == ExpPoly({6: 64})
        system = assemble_system()
        assert system.equations[:7] == tuple(f"s=0,x^{p}" for p in range(7))


class TestSolve:
    def test_reproduces_stored_coefficients(self):
        assignment = solve_exact(assemble_system())
        assert assignment["g8_x2"] == 10416
        assert assignment["g11_x0"] == 256032
        assert assignment["g10_x1"] == 2016
        assert assignment["g10_x0"] == 2016 * 81685 + 2016 * 960  # = 2016 * 82645

    def test_expand_matches_stored_table(self):
        _, polys, report = derive()
        assert report.is_empty()
        for i in range(7, 13):
            assert polys[i] == N6_FAMILY.entry(i).poly, i

    def test_rank12_expansion_extremes(self):
        polys = derived_polys(solve_exact(assemble_system()))
        assert polys[12].coefficient(0) == 2**6 * 2**51
        assert polys[12].coefficient(5) == -(2**6) * (sum(2**j for j in range(6, 12)) // 2**6) * 2**6
        assert polys[12] == full_rank_poly(6)

    def test_derived_family_satisfies_moment_identities_symbolically(self):
        polys = derived_polys(solve_exact(assemble_system()))
        family = dict(known_low_rank_polys())
        family.update(polys)
        for s in (0, 1, 2):
            acc = ExpPoly()
            for i, poly in family.items():
                acc = acc + poly * 2 ** ((12 - i) * s)
            assert acc == n6_moment_poly(s), s

    def test_factored_forms_vanish_at_their_roots(self):
        polys = derived_polys(solve_exact(assemble_system()))
        for i in range(7, 13):
            for k in range(6, i):
                assert polys[i].evaluate_int(k) == 0, (i, k)

    def test_comparison_report_reflexive(self):
        report = expand_and_compare(solve_exact(assemble_system()))
        assert report.is_empty()
        assert report.to_json_dict() == {}


class TestSolverErrorPaths:
    def test_inconsistent_system_reported(self):
        system = LinearSystemQ(
            matrix=((Fraction(1), Fraction(1)), (Fraction(2), Fraction(2))),
            rhs=(Fraction(1), Fraction(3)),
            unknowns=("a", "b"),
            equations=("eq0", "eq1"),
        )
        with pytest.raises(InconsistentSystemError, match="eq1"):
            solve_exact(system)

    def test_underdetermined_system_reported(self):
        system = LinearSystemQ(
            matrix=((Fraction(1), Fraction(1)),),
            rhs=(Fraction(1),),
            unknowns=("a", "b"),
            equations=("eq0",),
        )
        with pytest.raises(UnderdeterminedSystemError, match="b"):
            solve_exact(system)

    def test_rational_entries_are_scaled_exactly(self):
        system = LinearSystemQ(
            matrix=((Fraction(1, 2), Fraction(0)), (Fraction(0), Fraction(1, 3))),
            rhs=(Fraction(5, 2), Fraction(2)),
            unknowns=("a", "b"),
            equations=("eq0", "eq1"),
        )
        assert solve_exact(system) == {"a": Fraction(5), "b": Fraction(6)}
