"""Exact rational helpers and the [numerator, denominator] wire format.

No floating point is accepted anywhere: exactness is part of every public
contract, so floats are rejected at the boundary instead of silently rounded.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import ValidationError


def as_fraction(value) -> Fraction:
    """Coerce ints, strings like "3/2", and Fractions to Fraction; reject floats."""
    if isinstance(value, bool):
        raise ValidationError(f"not a rational number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational number: {value!r}") from exc
    raise ValidationError(f"not a rational number: {value!r}")


def to_pair(value: Fraction) -> list:
    """Wire form of a rational: [numerator, denominator] with denominator > 0."""
    return [value.numerator, value.denominator]


def from_wire(value) -> Fraction:
    """Parse a wire rational: a [numerator, denominator] pair or a bare integer."""
    if isinstance(value, bool):
        raise ValidationError(f"bad rational on the wire: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        num, den = value
        if isinstance(num, int) and isinstance(den, int) and not isinstance(num, bool) and not isinstance(den, bool):
            if den == 0:
                raise ValidationError("zero denominator")
            return Fraction(num, den)
    raise ValidationError(f"bad rational on the wire: {value!r}")
