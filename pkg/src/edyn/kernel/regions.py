"""Exact region algebra for the built-in space kinds.

A region is a finitely described subset of a space: a symbol box in a
Cantor-type space, a rational interval or arc, a product box, an arc on
one circle of a disk-of-circles carrier, or a bare metric ball.  Pieces
(the closed cells the covering engine subdivides) reuse the same
dataclasses with closed boundary flags.

All tests in this module are exact rational decisions.  Anything that
needs the distance oracle (metric balls on spaces without special
geometry) is handled by the owning space, not here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Box:
    """Subset of a Cantor-type space given by per-coordinate symbol sets.

    entries is a sorted tuple of (coordinate, allowed symbols) pairs with
    each symbol set a nonempty proper subset of that level's alphabet.
    No entries means the whole space.  Boxes are clopen, so the same
    object serves as an open region and as a closed piece.
    """

    entries: tuple[tuple[int, frozenset[int]], ...] = ()

    def allowed(self, coord: int) -> frozenset[int] | None:
        for c, syms in self.entries:
            if c == coord:
                return syms
        return None

    def coords(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.entries)


@dataclass(frozen=True)
class Iv:
    """Rational interval, a subset of the unit interval space.

    Endpoints may lie outside [0, 1]; membership is always understood
    relative to the space.  lo_strict/hi_strict mark open endpoints.
    """

    lo: Fraction
    hi: Fraction
    lo_strict: bool = True
    hi_strict: bool = True


@dataclass(frozen=True)
class Arc:
    """Arc on the circle of circumference one, from start, going length around.

    full marks the whole circle.  Strict flags mark open endpoints.
    """

    start: Fraction = Fraction(0)
    length: Fraction = Fraction(1)
    lo_strict: bool = True
    hi_strict: bool = True
    full: bool = False


@dataclass(frozen=True)
class PBox:
    """Product-space box: finitely many components constrained, the rest full."""

    entries: tuple[tuple[int, object], ...] = ()

    def component(self, i: int):
        for c, reg in self.entries:
            if c == i:
                return reg
        return None


@dataclass(frozen=True)
class RingArc:
    """Arc on one circle of a disk-of-circles carrier (circle index n, radius 1/n)."""

    n: int
    arc: Arc


@dataclass(frozen=True)
class OriginPt:
    """The origin of a disk-of-circles carrier (isolated, hence clopen)."""


@dataclass(frozen=True)
class MetricBall:
    """Ball of the space metric around an ideal point; closed=False is the open ball."""

    center: int
    radius: Fraction
    closed: bool = False


@dataclass(frozen=True)
class AntiBall:
    """Open exterior {x : d(x, center) > radius} of a closed metric ball.

    Used as a cover target: a compact set is covered by AntiBall(c, r)
    exactly when it avoids the closed ball of radius r about c.
    """

    center: int
    radius: Fraction


EMPTY = "empty"


def region_key(region) -> tuple:
    """Total order key for deterministic iteration over mixed regions."""
    if isinstance(region, Box):
        return (0, tuple((c, tuple(sorted(s))) for c, s in region.entries))
    if isinstance(region, Iv):
        return (1, region.lo, region.hi, region.lo_strict, region.hi_strict)
    if isinstance(region, Arc):
        return (2, region.full, region.start, region.length, region.lo_strict, region.hi_strict)
    if isinstance(region, PBox):
        return (3, tuple((c, region_key(r)) for c, r in region.entries))
    if isinstance(region, RingArc):
        return (4, region.n, region_key(region.arc))
    if isinstance(region, OriginPt):
        return (5,)
    if isinstance(region, MetricBall):
        return (6, region.center, region.radius, region.closed)
    if isinstance(region, AntiBall):
        return (7, region.center, region.radius)
    raise TypeError(f"not a region: {region!r}")


# ---------------------------------------------------------------- boxes

def box_make(entries, sizes) -> Box | str:
    """Normalize entries; returns EMPTY when some symbol set is empty."""
    norm = []
    merged: dict[int, frozenset] = {}
    for c, syms in entries:
        syms = frozenset(syms)
        merged[c] = merged[c] & syms if c in merged else syms
    for c in sorted(merged):
        syms = merged[c]
        if not syms:
            return EMPTY
        if len(syms) < sizes(c):
            norm.append((c, syms))
    return Box(tuple(norm))


def box_subset(a: Box, b: Box) -> bool:
    """Exact test a is a subset of b."""
    for c, syms in b.entries:
        mine = a.allowed(c)
        if mine is None or not mine <= syms:
            return False
    return True


def box_intersection(a: Box, b: Box, sizes) -> Box | str:
    return box_make(a.entries + b.entries, sizes)


def box_complement(b: Box, sizes) -> list[Box]:
    """The complement of a box as a finite union of boxes."""
    out = []
    for c, syms in b.entries:
        rest = frozenset(range(sizes(c))) - syms
        if rest:
            out.append(Box(((c, rest),)))
    return out


def box_fix(b: Box, coord: int, sym: int, sizes) -> Box | str:
    return box_make(b.entries + ((coord, frozenset({sym})),), sizes)


def boxes_cover_everything(boxes, sizes) -> bool:
    """Exact test that a finite union of boxes is the whole space.

    Recursive splitting on the lowest coordinate constrained by a box
    that is not yet satisfied.  Exponential in the worst case but the
    support sets at stake here are small.
    """
    def covered(partial: Box) -> bool:
        live = []
        for b in boxes:
            if box_subset(partial, b):
                return True
            if box_intersection(partial, b, sizes) != EMPTY:
                live.append(b)
        pick = None
        fixed = dict(partial.entries)
        for b in live:
            for c, _ in b.entries:
                if c not in fixed or len(fixed[c]) > 1:
                    pick = c if pick is None else min(pick, c)
        if pick is None:
            return False
        current = fixed.get(pick, frozenset(range(sizes(pick))))
        return all(covered(box_fix(partial, pick, s, sizes)) for s in sorted(current))

    return covered(Box())


# ---------------------------------------------------------- intervals

def iv_contains_closed(region: Iv, a: Fraction, b: Fraction) -> bool:
    """Exact test [a, b] subset of the interval region."""
    lo_ok = region.lo < a or (region.lo <= a and not region.lo_strict)
    hi_ok = region.hi > b or (region.hi >= b and not region.hi_strict)
    return lo_ok and hi_ok and a <= b


def iv_complement(region: Iv) -> list[Iv]:
    """Complement within the real line, to be intersected with the space."""
    return [Iv(Fraction(-2), region.lo, True, region.lo_strict is False),
            Iv(region.hi, Fraction(2), region.hi_strict is False, True)]


def iv_intersect(a: Iv, b: Iv) -> Iv | str:
    if a.lo > b.lo or (a.lo == b.lo and a.lo_strict):
        lo, los = a.lo, a.lo_strict
    else:
        lo, los = b.lo, b.lo_strict
    if a.hi < b.hi or (a.hi == b.hi and a.hi_strict):
        hi, his = a.hi, a.hi_strict
    else:
        hi, his = b.hi, b.hi_strict
    if lo > hi or (lo == hi and (los or his)):
        return EMPTY
    return Iv(lo, hi, los, his)


def iv_nonempty_in_unit(region: Iv) -> bool:
    """Exact nonemptiness of the region's trace on [0, 1]."""
    r = iv_intersect(region, Iv(Fraction(0), Fraction(1), False, False))
    return r != EMPTY


# --------------------------------------------------------------- arcs

def mod1(x: Fraction) -> Fraction:
    f = x - Fraction(int(x))
    if f < 0:
        f += 1
    return f


def arc_contains_point(arc: Arc, x: Fraction) -> bool:
    if arc.full:
        return True
    delta = mod1(x - arc.start)
    if delta == 0:
        return not arc.lo_strict
    if delta < arc.length:
        return True
    if delta == arc.length:
        return not arc.hi_strict
    return False


def arc_contains_closed(region: Arc, start: Fraction, length: Fraction) -> bool:
    """Exact test that the closed arc [start, start+length] is inside region."""
    if region.full:
        return True
    if length >= region.length:
        return False
    delta = mod1(start - region.start)
    lo_ok = delta > 0 or (delta == 0 and not region.lo_strict)
    end = delta + length
    hi_ok = end < region.length or (end == region.length and not region.hi_strict)
    return lo_ok and hi_ok


def arc_complement_closed(start: Fraction, length: Fraction) -> list[Arc]:
    """Open complement of a closed arc on the circle."""
    if length >= 1:
        return []
    return [Arc(mod1(start + length), 1 - length, True, True)]


def arcs_intersection_nonempty(arcs: list[tuple[Fraction, Fraction, bool, bool]]) -> bool:
    """Exact nonemptiness of an intersection of arcs given as (start, length, lo_strict, hi_strict).

    Arcs of length >= 1 are treated as the full circle.  Decided by
    sweeping candidate points: every nonempty intersection of finitely
    many arcs contains either some arc start, or a point just after one
    (when starts are excluded), so testing starts and midpoints of the
    refinements suffices; we instead intersect explicitly.
    """
    pieces: list[tuple[Fraction, Fraction, bool, bool]] | None = None
    for arc in arcs:
        s, ln, los, his = arc
        if ln >= 1:
            continue
        if pieces is None:
            pieces = [(mod1(s), ln, los, his)]
            continue
        nxt = []
        for (ps, pl, plos, phis) in pieces:
            delta = mod1(s - ps)
            # overlap of [0, pl] with [delta, delta+ln] on the line (two unwrappings)
            for off in (delta, delta - 1):
                lo = max(Fraction(0), off)
                hi = min(pl, off + ln)
                if lo > hi:
                    continue
                lo_strict = (plos and lo == 0) or (los and lo == off)
                hi_strict = (phis and hi == pl) or (his and hi == off + ln)
                if lo == hi and (lo_strict or hi_strict):
                    continue
                nxt.append((mod1(ps + lo), hi - lo, lo_strict, hi_strict))
        pieces = nxt
        if not pieces:
            return False
    return True if pieces is None else bool(pieces)
