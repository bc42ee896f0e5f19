"""Exact rational arithmetic.

Every LP value, edge capacity and degree bound in this package is an exact
fraction; nothing is ever rounded.  gmpy2's mpq is used when available
(roughly an order of magnitude faster), with the stdlib Fraction as a
drop-in fallback.  Both render integers as "p" and proper fractions as
"p/q", which is the wire format used by instance files, solution files and
traces.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as Rat

ZERO = Rat(0)
ONE = Rat(1)
HALF = Rat(1, 2)
THREE_HALVES = Rat(3, 2)


def as_rat(value) -> Rat:
    """Coerce an int or rational to Rat."""
    return Rat(value)


def parse_rat(text: str) -> Rat:
    """Parse "p" or "p/q" (q > 0) into an exact rational.

    Floats, embedded whitespace and negative denominators are rejected;
    raises ValueError on anything that is not a plain integer ratio.
    """
    num, sep, den = text.partition("/")
    n = int(num)
    if not sep:
        return Rat(n)
    d = int(den)
    if d <= 0:
        raise ValueError(f"denominator must be positive: {text!r}")
    return Rat(n, d)


def rat_str(value) -> str:
    """Exact text form: "p" for integers, "p/q" otherwise."""
    return str(as_rat(value))


def is_half_integral(value) -> bool:
    """True when value is k/2 for some integer k."""
    return as_rat(value).denominator in (1, 2)
