"""Exact rational scalar type.

gmpy2's mpq is used when present (several times faster than Fraction,
hash- and str-compatible with it); the stdlib Fraction is the fallback.
Everything downstream relies only on the shared rational protocol:
two-argument construction, string parsing, numerator/denominator, and
exact arithmetic mixing freely with ints.
"""

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q


def as_int_pair(x):
    """(numerator, denominator) as plain ints for any rational-like x."""
    return int(x.numerator), int(x.denominator)
