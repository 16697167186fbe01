"""Bijective codings between natural numbers and the index sets used everywhere else.

Ball indices, ideal-point indices and finite tuples all go through the
codecs in this module, so that every enumeration in the package is over a
fixed, explicit bijection with the naturals.  Nothing here depends on any
other module.
"""

from __future__ import annotations

from fractions import Fraction


def pair(i: int, j: int) -> int:
    """Cantor pairing of two naturals."""
    if i < 0 or j < 0:
        raise ValueError(f"pair needs naturals, got ({i}, {j})")
    s = i + j
    return s * (s + 1) // 2 + j


def unpair(n: int) -> tuple[int, int]:
    """Inverse of pair."""
    if n < 0:
        raise ValueError(f"unpair needs a natural, got {n}")
    # largest s with s(s+1)/2 <= n
    s = (int((8 * n + 1) ** 0.5) - 1) // 2
    while s * (s + 1) // 2 > n:
        s -= 1
    while (s + 1) * (s + 2) // 2 <= n:
        s += 1
    j = n - s * (s + 1) // 2
    return s - j, j


def nat_to_posrat(n: int) -> Fraction:
    """The n-th positive rational, via the Calkin-Wilf tree.

    Index 0 is 1/1; node n has children 2n+1 (value a/(a+b)) and
    2n+2 (value (a+b)/b).  This is a bijection between the naturals
    and the positive rationals.
    """
    if n < 0:
        raise ValueError(f"need a natural, got {n}")
    path = []
    while n > 0:
        path.append((n - 1) % 2)
        n = (n - 1) // 2
    a, b = 1, 1
    for bit in reversed(path):
        if bit == 0:
            b = a + b
        else:
            a = a + b
    return Fraction(a, b)


def posrat_to_nat(q: Fraction) -> int:
    """Inverse of nat_to_posrat."""
    if q <= 0:
        raise ValueError(f"need a positive rational, got {q}")
    a, b = q.numerator, q.denominator
    bits = []
    while (a, b) != (1, 1):
        if a < b:
            bits.append(0)
            b = b - a
        else:
            bits.append(1)
            a = a - b
    n = 0
    for bit in reversed(bits):
        n = 2 * n + 1 + bit
    return n


def nat_to_unitrat(n: int) -> Fraction:
    """The n-th rational in [0, 1]: 0, 1, then q/(1+q) over positive q."""
    if n == 0:
        return Fraction(0)
    if n == 1:
        return Fraction(1)
    q = nat_to_posrat(n - 2)
    return q / (1 + q)

def unitrat_to_nat(x: Fraction) -> int:
    if x == 0:
        return 0
    if x == 1:
        return 1
    if not 0 < x < 1:
        raise ValueError(f"need a rational in [0,1], got {x}")
    return posrat_to_nat(x / (1 - x)) + 2


def nat_to_circlerat(n: int) -> Fraction:
    """The n-th rational in [0, 1): 0, then q/(1+q) over positive q."""
    if n == 0:
        return Fraction(0)
    q = nat_to_posrat(n - 1)
    return q / (1 + q)

def circlerat_to_nat(x: Fraction) -> int:
    if x == 0:
        return 0
    if not 0 < x < 1:
        raise ValueError(f"need a rational in [0,1), got {x}")
    return posrat_to_nat(x / (1 - x)) + 1


def ball_code(center: int, radius: Fraction) -> int:
    """Index of the basic ball with the given ideal-point index and rational radius > 0."""
    if radius <= 0:
        raise ValueError(f"basic balls need positive radius, got {radius}")
    return pair(center, posrat_to_nat(radius))


def ball_decode(n: int) -> tuple[int, Fraction]:
    i, r = unpair(n)
    return i, nat_to_posrat(r)


def list_to_nat(xs: list[int]) -> int:
    """Bijection between finite lists of naturals and the naturals (0 is the empty list)."""
    n = 0
    for x in reversed(xs):
        n = pair(x, n) + 1
    return n


def nat_to_list(n: int) -> list[int]:
    xs = []
    while n > 0:
        x, n = unpair(n - 1)
        xs.append(x)
    return xs


def word_rank(word: tuple[int, ...], sizes) -> int:
    """Rank of a word in the length-then-lex order on a tree of finite levels.

    sizes(k) is the number of symbols available at level k (>= 1).  For a
    constant alphabet of size m this is the usual length-lex rank over m
    symbols.
    """
    if len(word) == 0:
        return 0
    rank = 0
    block = 1
    for lvl in range(len(word)):
        if not 0 <= word[lvl] < sizes(lvl):
            raise ValueError(f"symbol {word[lvl]} out of range at level {lvl}")
        rank += block
        block *= sizes(lvl)
    offset = 0
    tail = 1
    for lvl in range(len(word) - 1, -1, -1):
        offset += word[lvl] * tail
        tail *= sizes(lvl)
    return rank + offset


def word_unrank(n: int, sizes) -> tuple[int, ...]:
    """Inverse of word_rank."""
    if n < 0:
        raise ValueError(f"need a natural, got {n}")
    if n == 0:
        return ()
    n -= 1
    length = 1
    block = sizes(0)
    while n >= block:
        n -= block
        block *= sizes(length)
        length += 1
    digits = []
    for lvl in range(length - 1, -1, -1):
        m = sizes(lvl)
        digits.append(n % m)
        n //= m
    return tuple(reversed(digits))
