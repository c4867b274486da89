"""Exact rational arithmetic used everywhere in the engine.

All probabilities, payoffs, LP coefficients and responsibility values are
`Rat` instances (gmpy2.mpq): arbitrary precision, always in lowest terms
with a positive denominator.  No floating point is permitted anywhere in
the decision pipeline, since the core predicates reduce to exact equality
of a game value with 1.
"""

from __future__ import annotations

from gmpy2 import mpq

Rat = type(mpq())

ZERO = mpq(0)
ONE = mpq(1)


def rat(numerator, denominator=None) -> Rat:
    """Build an exact rational from ints, strings or another rational."""
    if denominator is None:
        return mpq(numerator)
    return mpq(numerator, denominator)


def parse_rat(text: str) -> Rat:
    """Parse an ``"a/b"`` (or bare ``"a"``) string into a rational."""
    s = text.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return mpq(int(num), int(den))
    return mpq(int(s))


def rat_str(value) -> str:
    """Serialize a rational as an explicit ``"a/b"`` string."""
    q = mpq(value)
    return f"{q.numerator}/{q.denominator}"
