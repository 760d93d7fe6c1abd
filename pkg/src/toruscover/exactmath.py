"""Exact integer and rational helpers for schedule arithmetic.

Scheduled constructions produce interval counts and lengths far outside the
double range (lengths like 2^-2536 and counts with tens of thousands of
bits), so everything here works on python ints and fractions.Fraction and
only drops to float at the reporting boundary.
"""

from __future__ import annotations

import math
from fractions import Fraction


def ceil_div(a: int, b: int) -> int:
    """Ceiling of a/b for integers, b > 0."""
    return -((-a) // b)


def ceil_fraction(x: Fraction) -> int:
    return ceil_div(x.numerator, x.denominator)


def floor_fraction(x: Fraction) -> int:
    return x.numerator // x.denominator


def integer_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for nonnegative n and positive integer k.

    Powers of two in k reduce to iterated isqrt (floor commutes with nested
    square roots); other k run a Newton iteration with a bit-length start.
    """
    if n < 0:
        raise ValueError("negative radicand")
    if k <= 0:
        raise ValueError("root order must be positive")
    if n in (0, 1) or k == 1:
        return n
    while k % 2 == 0:
        n = math.isqrt(n)
        k //= 2
        if k == 1:
            return n
    # Newton for x^k = n, guaranteed to land on floor from above
    x = 1 << (ceil_div(n.bit_length(), k))
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def floor_pow2(exponent: Fraction) -> int:
    """floor(2 ** exponent) for a nonnegative rational exponent, exactly."""
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    p, q = exponent.numerator, exponent.denominator
    if q == 1:
        return 1 << p
    return integer_root(1 << p, q)


def ceil_pow2(exponent: Fraction) -> int:
    """ceil(2 ** exponent) for a nonnegative rational exponent, exactly.

    2^(p/q) is an integer only when q divides p (two is not a perfect
    power), so the ceiling is the floor plus one in every other case.
    """
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    p, q = exponent.numerator, exponent.denominator
    if p % q == 0:
        return 1 << (p // q)
    return floor_pow2(exponent) + 1


def floor_log2_fraction(x: Fraction) -> int:
    """The exponent e with 2^e <= x < 2^(e+1), exactly, for x > 0."""
    if x <= 0:
        raise ValueError("argument must be positive")
    num, den = x.numerator, x.denominator
    e = num.bit_length() - den.bit_length()
    # num/den is within a factor of two of 2^e; fix up the off-by-one
    if e >= 0:
        if num >= (den << (e + 1)):
            e += 1
        elif num < (den << e):
            e -= 1
    else:
        if (num << (-e)) < den:
            e -= 1
        elif (num << (-e - 1)) >= den:
            e += 1
    return e


def log2_int(n: int) -> float:
    """log2 of a positive integer of any size, to double precision."""
    if n <= 0:
        raise ValueError("argument must be positive")
    bits = n.bit_length()
    if bits <= 53:
        return math.log2(n)
    top = n >> (bits - 53)
    return (bits - 53) + math.log2(top)


def log2_fraction(x: Fraction) -> float:
    """log2 of a positive rational of any size, to double precision."""
    if x <= 0:
        raise ValueError("argument must be positive")
    return log2_int(x.numerator) - log2_int(x.denominator)


def is_dyadic(x: Fraction) -> bool:
    """True iff x has a power-of-two denominator (includes integers)."""
    den = x.denominator
    return den & (den - 1) == 0


def dyadic_pair(x: Fraction) -> tuple[int, int]:
    """Write a dyadic rational as (numerator, exponent) with x = num/2^exp."""
    if not is_dyadic(x):
        raise ValueError(f"{x} is not a dyadic rational")
    return x.numerator, x.denominator.bit_length() - 1
