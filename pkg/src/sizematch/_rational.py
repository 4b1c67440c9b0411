"""Exact-number plumbing shared across the package.

All internal arithmetic runs on :class:`fractions.Fraction`.  Floats are
promoted to their exact binary value, so a value that came in as a float
compares equal to the Fraction it became and survives a JSON round trip
bit-exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction

RealLike = (int, float, Fraction)


def as_fraction(value) -> Fraction:
    """Return ``value`` as an exact :class:`Fraction`.

    Accepts int, Fraction, and finite float (promoted to its exact binary
    value).  Anything else, including NaN and infinities, is rejected.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("expected a real number, got a bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"expected a finite number, got {value!r}")
        return Fraction(value)
    raise TypeError(f"expected a real number, got {type(value).__name__}")


def number_to_json(value):
    """Encode an exact number for JSON output.

    Values that a 64-bit float represents exactly are emitted as floats
    (ints as ints); anything else becomes the string ``"p/q"`` so that
    parsing the output reproduces the value bit-exactly.
    """
    frac = as_fraction(value)
    if frac.denominator == 1:
        return int(frac)
    as_float = float(frac)
    if math.isfinite(as_float) and Fraction(as_float) == frac:
        return as_float
    return f"{frac.numerator}/{frac.denominator}"


def number_from_json(value) -> Fraction:
    """Decode a number written by :func:`number_to_json`."""
    if isinstance(value, str):
        num, sep, den = value.partition("/")
        if not sep:
            raise ValueError(f"malformed rational literal {value!r}")
        try:
            return Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational literal {value!r}") from exc
    return as_fraction(value)
