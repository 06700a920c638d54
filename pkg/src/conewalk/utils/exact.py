"""Exact-number helpers shared by the algebra and increment layers."""

import math
from fractions import Fraction
from numbers import Integral

import sympy

ExactNumber = sympy.Expr


def canonical(value: sympy.Expr) -> sympy.Expr:
    """Bring an exact number to a canonical form so equal values compare equal.

    Rationals pass through untouched. Surd expressions are rationalised and
    expanded, e.g. 1/(1+sqrt(2)) becomes sqrt(2) - 1.
    """
    if isinstance(value, sympy.Rational):
        return value
    return sympy.expand(sympy.radsimp(value))


def to_exact(value: object) -> sympy.Expr:
    """Convert a config or user value into an exact sympy number.

    Accepts ints, Fractions, sympy numbers, floats (through their shortest decimal
    repr, so 0.1 becomes 1/10) and strings such as "3/4" or "1+sqrt(2)".

    Raises:
        ValueError: if the value is not a finite real number
    """
    if isinstance(value, bool):
        raise ValueError(f"Not a number: {value!r}")
    if isinstance(value, Integral):
        return sympy.Integer(int(value))
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"Not a finite number: {value!r}")
        return sympy.Rational(repr(value))
    if isinstance(value, sympy.Basic):
        expr = value
    elif isinstance(value, str):
        try:
            expr = sympy.sympify(value.strip(), rational=True)
        except (sympy.SympifyError, SyntaxError, TypeError) as e:
            raise ValueError(f"Cannot parse {value!r} as a number") from e
    else:
        raise ValueError(f"Unsupported number type {type(value).__name__}")

    if not expr.is_number or expr.is_real is False or expr.is_finite is False:
        raise ValueError(f"Not a finite real number: {value!r}")
    return canonical(expr)


def to_fraction(value: sympy.Expr) -> Fraction:
    """Exact rational as a Fraction; raises ValueError for irrational input."""
    value = canonical(sympy.sympify(value))
    if not isinstance(value, sympy.Rational):
        raise ValueError(f"{value} is not rational")
    return Fraction(int(value.p), int(value.q))


def is_rational(value: sympy.Expr) -> bool:
    return isinstance(canonical(sympy.sympify(value)), sympy.Rational)


def rational_gcd(values: list[Fraction]) -> Fraction:
    """Largest g > 0 with every value an integer multiple of g (zero values ignored)."""
    nonzero = [abs(v) for v in values if v != 0]
    if not nonzero:
        return Fraction(0)
    # gcd of reduced fractions a_i/b_i is gcd(a_i)/lcm(b_i)
    return Fraction(
        math.gcd(*(v.numerator for v in nonzero)), math.lcm(*(v.denominator for v in nonzero))
    )
