"""Exact rational coercion and string form shared by the whole package."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def exact(value) -> Fraction:
    """Coerce ``value`` to a Fraction, refusing anything inexact.

    Accepts ints, Fractions (and other Rationals) and strings such as
    ``"3/7"``, ``"-2"`` or ``"0.25"`` (decimal strings are exact).  Binary
    floats are rejected: they would silently smuggle rounding error into a
    library whose whole contract is exactness.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(
            f"refusing float {value!r}: pass an int, Fraction or string "
            "like '1/3' to keep arithmetic exact"
        )
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def frac_str(value: Fraction) -> str:
    """Serialize a rational as ``"p"`` or ``"p/q"``; round-trips via exact()."""
    return str(Fraction(value))
