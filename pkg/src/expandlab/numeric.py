"""Exact rational scalars.

Set elements are :class:`fractions.Fraction` values.  ``Fraction`` already
keeps numerator and denominator reduced with a positive denominator and hashes
consistently with ``int``, so it is used directly as the scalar type; this
module adds the strict text syntax used by set files and the expression
language.
"""

from __future__ import annotations

import numbers
import re
from fractions import Fraction

from .errors import ParseError, ZeroDenominator

Rational = Fraction

_INT_OR_RATIO = re.compile(r"(?P<num>[+-]?\d+)(?:/(?P<den>\d+))?")
_DECIMAL = re.compile(r"(?P<sign>[+-]?)(?P<int>\d*)\.(?P<frac>\d*)")


def normalize(num: int, den: int) -> Fraction:
    """Canonical reduced rational ``num/den`` with positive denominator."""
    if den == 0:
        raise ZeroDenominator(f"{num}/0")
    return Fraction(int(num), int(den))


def parse_scalar(text: str) -> Fraction:
    """Parse an integer, ``p/q`` or finite decimal without touching floats.

    >>> parse_scalar("0.25")
    Fraction(1, 4)
    """
    s = text.strip()
    m = _INT_OR_RATIO.fullmatch(s)
    if m:
        den = m.group("den")
        return normalize(int(m.group("num")), int(den) if den is not None else 1)
    m = _DECIMAL.fullmatch(s)
    if m and (m.group("int") or m.group("frac")):
        digits = m.group("int") + m.group("frac")
        value = Fraction(int(digits), 10 ** len(m.group("frac")))
        return -value if m.group("sign") == "-" else value
    raise ParseError(f"malformed scalar {text!r}")


def format_scalar(value) -> str:
    """Canonical text: ``p`` for integers, ``p/q`` otherwise."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and scalar strings to a Fraction.

    Floats are rejected: a float has usually already been rounded.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, numbers.Rational):
        return normalize(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")
