"""Field axioms, parsing and formatting of the exact scalars."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mouldpert.scalars import (
    GaussianRational,
    I,
    ONE,
    ScalarParseError,
    ZERO,
    format_scalar,
    parse_scalar,
)


def gr(re, im=0):
    return GaussianRational(Fraction(re), Fraction(im))


small_fractions = st.fractions(
    min_value=-8, max_value=8, max_denominator=12
)

scalars = st.builds(GaussianRational, small_fractions, small_fractions)
nonzero_scalars = scalars.filter(bool)


def test_rational_addition():
    assert gr(Fraction(1, 2)) + gr(Fraction(1, 3)) == gr(Fraction(5, 6))


def test_i_squared():
    assert I * I == -ONE


def test_division_by_complex():
    assert ONE / gr(2, -1) == gr(Fraction(2, 5), Fraction(1, 5))


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO
    with pytest.raises(ZeroDivisionError):
        ZERO.reciprocal()


def test_mixed_arithmetic_with_int_and_fraction():
    x = gr(1, 2)
    assert x + 1 == gr(2, 2)
    assert 3 * x == gr(3, 6)
    assert x - Fraction(1, 2) == gr(Fraction(1, 2), 2)
    assert 1 / I == -I


def test_power():
    assert I ** 2 == -ONE
    assert I ** -1 == -I
    assert gr(2) ** 5 == gr(32)
    assert gr(2, 1) ** 0 == ONE


@given(scalars, scalars)
def test_conjugation_is_multiplicative(a, b):
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()


@given(scalars)
def test_conjugation_is_an_involution(a):
    assert a.conjugate().conjugate() == a


@given(scalars, nonzero_scalars)
def test_division_inverts_multiplication(a, b):
    assert (a / b) * b == a


@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + ZERO == a
    assert a * ONE == a


@given(scalars)
def test_norm_squared_matches_conjugate_product(a):
    assert (a * a.conjugate()).re == a.norm_squared()
    assert (a * a.conjugate()).im == 0


def test_canonical_form_and_hash():
    assert gr(Fraction(2, 4)) == gr(Fraction(1, 2))
    assert hash(gr(3)) == hash(3)
    assert hash(gr(Fraction(1, 2))) == hash(Fraction(1, 2))
    assert gr(3) == 3
    assert gr(Fraction(1, 2)) == Fraction(1, 2)


def test_parse_examples():
    assert parse_scalar("3/4") == gr(Fraction(3, 4))
    assert parse_scalar("-1/2+2/3i") == gr(Fraction(-1, 2), Fraction(2, 3))
    assert parse_scalar("i") == I
    assert parse_scalar("-i") == -I
    assert parse_scalar("2i") == gr(0, 2)
    assert parse_scalar("1-i") == gr(1, -1)
    assert parse_scalar("0") == ZERO
    assert parse_scalar(" 5/2 ") == gr(Fraction(5, 2))


@pytest.mark.parametrize(
    "text",
    ["", "abc", "1/", "1/0", "1+", "1+2", "1 + 2i", "2i+1", "--1", "1//2", "3/4x"],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(ScalarParseError) as err:
        parse_scalar(text)
    assert err.value.pos >= 0


def test_parse_error_positions():
    with pytest.raises(ScalarParseError) as err:
        parse_scalar("1/0")
    assert err.value.pos == 2
    with pytest.raises(ScalarParseError) as err:
        parse_scalar("3/4x")
    assert err.value.pos == 3


@given(scalars)
def test_format_parse_roundtrip(a):
    assert parse_scalar(format_scalar(a)) == a


def test_format_examples():
    assert format_scalar(gr(0)) == "0"
    assert format_scalar(I) == "i"
    assert format_scalar(-I) == "-i"
    assert format_scalar(gr(0, Fraction(-2, 3))) == "-2/3i"
    assert format_scalar(gr(1, -1)) == "1-i"
    assert format_scalar(gr(Fraction(-1, 2), Fraction(2, 3))) == "-1/2+2/3i"


def test_repr_is_informative():
    assert "3/4" in repr(gr(Fraction(3, 4)))
