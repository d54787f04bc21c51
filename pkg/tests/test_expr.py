"""Expression parsing into functions, scalars and series."""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avjets.algebra import QQ, TruncSeries, laurent_ring, poly_ring
from avjets.errors import ParseError
from avjets.expr import parse_function, parse_scalar, parse_series


def test_function_basic():
    R = poly_ring("x")
    x = R.var(0)
    assert parse_function("x^2 - 3*x + 1/2", R) == x * x - x * 3 + Fraction(1, 2)


def test_negative_power_in_laurent_ring():
    R = laurent_ring("y")
    y = R.var(0)
    assert parse_function("y^-2 + y**(-1)", R) == y.inverse() ** 2 + y.inverse()
    assert parse_function("1/y", R) == y.inverse()


def test_unicode_minus():
    R = poly_ring("x")
    assert parse_function("−x", R) == -R.var(0)


def test_division_by_non_unit_is_an_error():
    with pytest.raises(ParseError) as exc:
        parse_function("1/(x+1)", poly_ring("x"))
    assert exc.value.column == 2


def test_scalar_with_parameters():
    assert parse_scalar("m+1", {"m": 2}) == 3
    assert parse_scalar("3/5") == Fraction(3, 5)
    assert parse_scalar("0.25") == Fraction(1, 4)


def test_series_with_coefficient_names():
    R = laurent_ring("y")
    s = parse_series("X + y^-1*X^2", R, ["X"], 4)
    y = R.var(0)
    assert s == TruncSeries(R, 1, 4, {(1,): 1, (2,): y.inverse()})


def test_series_truncates():
    s = parse_series("X^5 + X", QQ, ["X"], 3)
    assert s == TruncSeries.var(QQ, 1, 3, 0)


def test_series_division_by_unit():
    s = parse_series("X/(1 - X)", QQ, ["X"], 4)
    assert s == TruncSeries(QQ, 1, 4, {(k,): 1 for k in range(1, 5)})


@pytest.mark.parametrize("text, column", [
    ("x +* 2", 4),
    ("x^1.5", 3),
    ("(x + 1", 7),
    ("x $ 1", 3),
    ("2 z", 3),
])
def test_error_columns(text, column):
    with pytest.raises(ParseError) as exc:
        parse_function(text, poly_ring("x"))
    assert exc.value.column == column
    assert text in str(exc.value)


def test_unknown_name():
    with pytest.raises(ParseError, match="unknown name 'z'"):
        parse_function("x + z", poly_ring("x"))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(-9, 9), st.integers(0, 5)), min_size=1, max_size=5))
def test_rendered_polynomials_parse_back(terms):
    R = poly_ring("x")
    x = R.var(0)
    f = R.zero
    for c, e in terms:
        f = f + x ** e * c
    assert parse_function(str(f), R) == f


@settings(max_examples=80, deadline=None)
@given(st.integers(-20, 20), st.integers(1, 9), st.integers(-20, 20), st.integers(1, 9))
def test_scalar_arithmetic_matches_fraction(a, b, c, d):
    assert parse_scalar(f"{a}/{b} - ({c})/{d}") == Fraction(a, b) - Fraction(c, d)
