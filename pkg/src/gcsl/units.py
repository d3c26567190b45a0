"""Time literals and unit normalization.

Every time value inside the toolkit is a float expressed in a model's base
unit.  Calendar units are fixed: a month is 30 days and a year 365 days.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import ParseError

_SECONDS = {
    "ms": Fraction(1, 1000),
    "s": Fraction(1),
    "sec": Fraction(1),
    "second": Fraction(1),
    "min": Fraction(60),
    "minute": Fraction(60),
    "h": Fraction(3600),
    "hour": Fraction(3600),
    "day": Fraction(86400),
    "d": Fraction(86400),
    "week": Fraction(7 * 86400),
    "month": Fraction(30 * 86400),
    "mo": Fraction(30 * 86400),
    "year": Fraction(365 * 86400),
}

DEFAULT_UNIT = "day"

_TIME_RE = re.compile(r"^\s*(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)\s*([A-Za-z]*)\s*$")


def canonical_unit(name: str) -> str:
    """Map a unit spelling (``months``, ``Days``, ``secs``) to its table key."""
    key = name.lower()
    if key in _SECONDS:
        return key
    if key.endswith("s") and key[:-1] in _SECONDS:
        return key[:-1]
    raise ParseError(f"unknown time unit {name!r}")


def is_unit(name: str) -> bool:
    try:
        canonical_unit(name)
    except ParseError:
        return False
    return True


def to_base(value, unit: str | None, base_unit: str = DEFAULT_UNIT) -> float:
    """Convert ``value`` expressed in ``unit`` to ``base_unit``.

    A missing unit means the value is already in the base unit.
    """
    if isinstance(value, float) and math.isinf(value):
        return value
    if not unit:
        return float(value)
    scale = _SECONDS[canonical_unit(unit)] / _SECONDS[canonical_unit(base_unit)]
    return float(Fraction(str(value)) * scale)


def parse_time(text: str, base_unit: str = DEFAULT_UNIT) -> float:
    """Parse ``"4months"``, ``"6 months"``, ``"10"`` or ``"inf"`` into base units."""
    stripped = text.strip()
    if stripped.lower() in ("inf", "+inf", "∞", "+∞"):
        return math.inf
    m = _TIME_RE.match(stripped)
    if not m:
        raise ParseError(f"malformed time literal {text!r}")
    return to_base(m.group(1), m.group(2) or None, base_unit)


def format_time(value: float) -> str:
    """Shortest text that parses back to ``value`` (base units, no suffix)."""
    if math.isinf(value):
        return "inf"
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))
