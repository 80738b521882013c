"""Exact number handling shared by the event model and the JSON codecs."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, Fraction]

# Quarter-note grids in real scores never need finer denominators than this.
MAX_DENOMINATOR = 1 << 16


def as_rational(value) -> Number:
    """Coerce a JSON scalar (int, float, or "a/b" string) to an exact number."""
    if isinstance(value, bool):
        raise TypeError(f"expected a number, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(MAX_DENOMINATOR)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected a number, got {value!r}")


def to_json_number(value):
    if value is None or isinstance(value, (bool, int)):
        return value
    if isinstance(value, Fraction):
        return float(value)
    return value
