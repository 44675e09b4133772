"""Exact rational arithmetic used throughout the package.

All flow values, LP entries and potentials are rationals; floats only ever
appear inside the LP warm-start heuristic.  ``QQ`` is gmpy2's ``mpq`` when
available (much faster) and falls back to ``fractions.Fraction``; the two
interoperate, so callers may pass either.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as QQ  # type: ignore
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    QQ = Fraction

ZERO = QQ(0)
ONE = QQ(1)


def rat(value) -> "QQ":
    """Coerce ints, Fractions, mpqs or ``"p/q"`` strings to QQ."""
    if isinstance(value, str):
        return QQ(Fraction(value))
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact rationals: %r" % value)
    return QQ(value)


def rat_str(value) -> str:
    """Serialize a rational as ``"p/q"`` (always with the slash, e.g. ``"3/1"``)."""
    f = Fraction(value)
    return "%d/%d" % (f.numerator, f.denominator)


def floor_rat(value):
    """Floor of a rational, as a plain int."""
    f = Fraction(value)
    return f.numerator // f.denominator
