from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sglattice.exact import (
    QuadraticSurd,
    SingularMatrixError,
    exact_sqrt,
    format_scalar,
    is_zero,
    nullspace,
    parse_scalar,
    rank,
    solve,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)
radicands = st.sampled_from([2, 3, 5, 6, 13, 21])


def test_sqrt_collapses_perfect_squares():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(12) == QuadraticSurd(0, 2, 3)
    assert exact_sqrt(Fraction(1, 2)) == QuadraticSurd(0, Fraction(1, 2), 2)


def test_surd_arithmetic_golden_ratio():
    phi = (1 + exact_sqrt(5)) / 2
    assert phi * phi == phi + 1
    assert (5 - exact_sqrt(5)) / 2 * (5 - (5 - exact_sqrt(5)) / 2) == 5


@given(rationals, rationals, rationals, rationals, radicands)
def test_field_axioms(a, b, c, e, d):
    x = QuadraticSurd.make(a, b, d)
    y = QuadraticSurd.make(c, e, d)
    assert (x + y) - y == x
    assert x * y == y * x
    if y != 0:
        assert (x / y) * y == x


@given(rationals, rationals, radicands)
def test_exact_sign_matches_float(a, b, d):
    x = QuadraticSurd.make(a, b, d)
    f = float(x)
    if abs(f) > 1e-9:
        assert (x > 0) == (f > 0)


@given(rationals, rationals, radicands)
def test_parse_format_round_trip(a, b, d):
    x = QuadraticSurd.make(a, b, d)
    assert parse_scalar(format_scalar(x)) == x


def test_parse_forms():
    assert parse_scalar("7/2") == Fraction(7, 2)
    assert parse_scalar("3-sqrt3") == 3 - exact_sqrt(3)
    assert parse_scalar("(5+sqrt(13))/2") == (5 + exact_sqrt(13)) / 2
    assert parse_scalar("(5-sqrt(5))/2", "float") == pytest.approx(1.381966011250105)
    with pytest.raises(ValueError):
        parse_scalar("sqrt(x)")


def test_solve_and_nullspace():
    m = [[2, 1], [1, 3]]
    assert solve(m, [3, 4]) == [1, 1]
    with pytest.raises(SingularMatrixError):
        solve([[1, 2], [2, 4]], [1, 2])
    basis = nullspace([[1, 2, 3], [2, 4, 6]])
    assert len(basis) == 2 and rank([[1, 2, 3], [2, 4, 6]]) == 1
    for v in basis:
        assert sum(a * b for a, b in zip([1, 2, 3], v)) == 0


def test_solve_over_quadratic_field():
    s = exact_sqrt(2)
    x = solve([[1, s], [s, 3]], [1, 0])
    assert x[0] + s * x[1] == 1 and s * x[0] + 3 * x[1] == 0


def test_is_zero_modes():
    assert is_zero(Fraction(0)) and not is_zero(Fraction(1, 10**12))
    assert is_zero(1e-12) and not is_zero(1e-6)
