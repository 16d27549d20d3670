"""Exact rational helpers shared by every module.

All numbers in the core are :class:`fractions.Fraction`; this module only
adds the textual ``a/b`` format and the comparison relations.
"""
from __future__ import annotations

import enum
import math
import re
from fractions import Fraction
from typing import Iterable, Union

RationalLike = Union[Fraction, int, str]

_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


class Relation(enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "="
    LT = "<"
    GT = ">"

    @property
    def strict(self) -> bool:
        return self in (Relation.LT, Relation.GT)

    def holds(self, lhs, rhs) -> bool:
        if self is Relation.LE:
            return lhs <= rhs
        if self is Relation.GE:
            return lhs >= rhs
        if self is Relation.EQ:
            return lhs == rhs
        if self is Relation.LT:
            return lhs < rhs
        return lhs > rhs

    def complement(self) -> "Relation":
        """Relation satisfied exactly when this one fails."""
        try:
            return _COMPLEMENT[self]
        except KeyError:
            raise ValueError("EQ has no single-relation complement") from None

    def closed(self) -> "Relation":
        """The non-strict relaxation (LT -> LE, GT -> GE)."""
        return {Relation.LT: Relation.LE, Relation.GT: Relation.GE}.get(self, self)


_COMPLEMENT = {
    Relation.GE: Relation.LT,
    Relation.LE: Relation.GT,
    Relation.LT: Relation.GE,
    Relation.GT: Relation.LE,
}


def parse_rational(text: str) -> Fraction:
    """Parse ``"a"`` or ``"a/b"``. Unreduced input is normalized.

    >>> parse_rational("2/4")
    Fraction(1, 2)
    """
    m = _RAT_RE.match(text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out
