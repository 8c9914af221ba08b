from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from expandlab.errors import ParseError, ZeroDenominator
from expandlab.numeric import as_rational, format_scalar, normalize, parse_scalar


def test_normalize_reduces_and_fixes_sign():
    assert normalize(6, -4) == Fraction(-3, 2)
    assert normalize(0, 7) == 0


def test_normalize_zero_denominator():
    with pytest.raises(ZeroDenominator):
        normalize(1, 0)


@pytest.mark.parametrize(
    "text, value",
    [("3", 3), ("-3", -3), ("6/4", Fraction(3, 2)), ("-1/3", Fraction(-1, 3)),
     ("0.25", Fraction(1, 4)), (".5", Fraction(1, 2)), ("5.", 5), ("-0.1", Fraction(-1, 10)),
     ("  7  ", 7)],
)
def test_parse_scalar(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("text", ["", "1/-2", "abc", "1e3", "1/2/3", ".", "--1", "0x10"])
def test_parse_scalar_rejects(text):
    with pytest.raises(ParseError):
        parse_scalar(text)


def test_parse_scalar_zero_denominator():
    with pytest.raises(ZeroDenominator):
        parse_scalar("1/0")


def test_format_scalar():
    assert format_scalar(Fraction(4, 2)) == "2"
    assert format_scalar(Fraction(-1, 3)) == "-1/3"


def test_decimal_is_exact_not_float():
    assert parse_scalar("0.1") == Fraction(1, 10)
    assert parse_scalar("0.1") != Fraction(0.1)


def test_as_rational_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)
    assert as_rational("2/6") == Fraction(1, 3)


@given(st.fractions())
def test_format_parse_round_trip(q):
    assert parse_scalar(format_scalar(q)) == q
