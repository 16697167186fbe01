"""Rigorous rational bounds for the few non-rational quantities we need.

Everything returns exact Fractions that provably bracket the true value.
Used by the plane metric of circle carriers; the rest of the kernel is
purely rational and never goes through here.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt


def dyadic_round(x: Fraction, bits: int) -> Fraction:
    """Nearest multiple of 2^-bits; error at most 2^-(bits+1)."""
    scale = 1 << bits
    return Fraction(round(x * scale), scale)


def sqrt_bounds(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """lo <= sqrt(x) <= hi with hi - lo <= 2^-bits, for rational x >= 0."""
    if x < 0:
        raise ValueError(f"sqrt of negative rational {x}")
    if x == 0:
        return Fraction(0), Fraction(0)
    scale = 1 << (2 * bits + 2)
    n = (x.numerator * scale) // x.denominator      # n <= x*scale < n+1
    r = isqrt(n)                                    # r <= sqrt(n) < r+1
    lo = Fraction(r, 1 << (bits + 1))
    hi = Fraction(r + 2, 1 << (bits + 1))
    return lo, hi


@lru_cache(maxsize=None)
def pi_bounds(bits: int) -> tuple[Fraction, Fraction]:
    """lo <= pi <= hi with hi - lo <= 2^-bits, by Machin's formula.

    pi/4 = 4 arctan(1/5) - arctan(1/239); both arctan series alternate,
    so truncations bracket the true values.
    """
    def arctan_brackets(inv: int, terms: int) -> tuple[Fraction, Fraction]:
        x = Fraction(1, inv)
        total = Fraction(0)
        lo = hi = None
        power = x
        for k in range(terms):
            term = power / (2 * k + 1)
            total = total + term if k % 2 == 0 else total - term
            power *= x * x
            if k % 2 == 0:
                hi = total
            else:
                lo = total
        if lo is None:
            lo = total - x ** 3 / 3
        return lo, hi

    terms = max(4, bits // 4 + 4)
    lo5, hi5 = arctan_brackets(5, terms)
    lo239, hi239 = arctan_brackets(239, terms)
    lo = 16 * lo5 - 4 * hi239
    hi = 16 * hi5 - 4 * lo239
    return dyadic_round(lo, bits + 2) - Fraction(1, 1 << (bits + 2)), \
        dyadic_round(hi, bits + 2) + Fraction(1, 1 << (bits + 2))


def _sincos_taylor(t: Fraction, bits: int) -> tuple[Fraction, Fraction, Fraction]:
    """(sin approx, cos approx, error bound) for rational t, |t| <= 8."""
    if abs(t) > 8:
        raise ValueError(f"taylor argument {t} out of range")
    err = Fraction(1, 1 << (bits + 2))
    s = Fraction(0)
    c = Fraction(0)
    term = Fraction(1)
    k = 0
    while True:
        if k % 4 == 0:
            c += term
        elif k % 4 == 1:
            s += term
        elif k % 4 == 2:
            c -= term
        else:
            s -= term
        k += 1
        term = term * t / k
        if abs(term) < err and abs(t) < k:
            break
    # remainder of each series is bounded by the first omitted magnitude
    rem = abs(term) * 2
    s = dyadic_round(s, bits + 4)
    c = dyadic_round(c, bits + 4)
    return s, c, rem + Fraction(1, 1 << (bits + 3))


def cos_turn_bounds(theta: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Bracket cos(2*pi*theta) for rational theta within 2^-bits."""
    theta = theta - int(theta)
    pl, ph = pi_bounds(bits + 6)
    mid = 2 * theta * (pl + ph) / 2
    halfwidth = 2 * abs(theta) * (ph - pl) / 2
    s, c, err = _sincos_taylor(dyadic_round(mid, bits + 6), bits + 4)
    # |cos'| <= 1, plus rounding of the midpoint argument
    slack = err + halfwidth + Fraction(1, 1 << (bits + 5))
    return c - slack, c + slack


def sin_turn_bounds(theta: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Bracket sin(2*pi*theta) for rational theta within 2^-bits."""
    theta = theta - int(theta)
    pl, ph = pi_bounds(bits + 6)
    mid = 2 * theta * (pl + ph) / 2
    halfwidth = 2 * abs(theta) * (ph - pl) / 2
    s, c, err = _sincos_taylor(dyadic_round(mid, bits + 6), bits + 4)
    slack = err + halfwidth + Fraction(1, 1 << (bits + 5))
    return s - slack, s + slack
