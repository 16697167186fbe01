"""Computable metric spaces.

A space packages an enumeration of ideal points, a distance oracle with
explicit precision (query at bits n returns a rational within 2^-n of
the true distance), and the canonical enumeration of basic balls via the
pairing of ideal-point indices with positive rationals.

Each space also knows how to act as a piece domain for the covering
engine: it provides root pieces, certified piece-in-region tests,
deterministic splitting, and bounding balls for pieces.  For the
built-in kinds every ball decodes to an exact region (a symbol box, an
interval, an arc), so most certificates here are exact rational checks
rather than metric estimates.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from .. import coding
from . import regions as rg
from .regions import (AntiBall, Arc, Box, EMPTY, Iv, MetricBall, OriginPt,
                      PBox, RingArc, arc_contains_closed, arc_contains_point,
                      arcs_intersection_nonempty, box_complement,
                      box_intersection, box_make, box_subset,
                      iv_contains_closed, iv_intersect, mod1, region_key)
from .rigor import cos_turn_bounds, pi_bounds, sqrt_bounds


class Space:
    """Base computable metric space; see module docstring."""

    diameter: Fraction
    # whether engine pieces are clopen (so a closed piece is itself an open item)
    pieces_clopen: bool = False

    # ---- ideal points ------------------------------------------------
    def ideal_to_data(self, i: int):
        raise NotImplementedError

    def data_to_ideal(self, data) -> int:
        raise NotImplementedError

    def point_name(self, i: int) -> str:
        return repr(self.ideal_to_data(i))

    # ---- distance oracle ----------------------------------------------
    def distance_data(self, a, b, bits: int) -> Fraction:
        """Rational within 2^-bits of the true distance between ideal points."""
        raise NotImplementedError

    def distance(self, i: int, j: int, bits: int) -> Fraction:
        return self.distance_data(self.ideal_to_data(i), self.ideal_to_data(j), bits)

    def distance_upper(self, i: int, j: int, bits: int) -> Fraction:
        return self.distance(i, j, bits) + Fraction(1, 1 << bits)

    def distance_lower(self, i: int, j: int, bits: int) -> Fraction:
        return self.distance(i, j, bits) - Fraction(1, 1 << bits)

    # ---- balls and regions ---------------------------------------------
    def decode_ball(self, ball_index: int):
        """The exact region of the basic open ball with this index."""
        center, radius = coding.ball_decode(ball_index)
        return self.ball_region(center, radius)

    def ball_region(self, center: int, radius: Fraction):
        return MetricBall(center, radius)

    def normalize_item(self, item):
        """Enumerator item (ball index or region) to a region, or EMPTY."""
        if isinstance(item, int):
            return self.decode_ball(item)
        return item

    # ---- piece domain ---------------------------------------------------
    def root_pieces(self) -> tuple:
        raise NotImplementedError

    def split_piece(self, piece, hint) -> tuple:
        raise NotImplementedError

    def split_hint(self, piece, live_regions):
        """Where to split so the live regions can make progress; None if stuck."""
        raise NotImplementedError

    def default_hint(self, piece):
        """A hint that shrinks the piece when no region suggests one."""
        return 0

    def piece_bound(self, piece) -> tuple[int, Fraction]:
        """(ideal index, radius) of a certified bounding ball for the piece."""
        raise NotImplementedError

    def piece_inside(self, piece, region, bits: int) -> bool:
        """Certified: every point of the (closed) piece lies in the region."""
        if isinstance(region, MetricBall):
            center, rho = self.piece_bound(piece)
            gap = self.distance_upper(center, region.center, bits) + rho
            return gap < region.radius if not region.closed else gap <= region.radius
        if isinstance(region, AntiBall):
            center, rho = self.piece_bound(piece)
            return self.distance_lower(center, region.center, bits) - rho > region.radius
        return self._piece_inside_native(piece, region)

    def _piece_inside_native(self, piece, region) -> bool:
        raise NotImplementedError

    def piece_avoids(self, piece, region, bits: int) -> bool:
        """Certified: the piece does not meet the (closed) region."""
        if isinstance(region, MetricBall):
            center, rho = self.piece_bound(piece)
            return self.distance_lower(center, region.center, bits) - rho > region.radius
        if isinstance(region, AntiBall):
            # avoiding the exterior means lying inside the closed ball
            center, rho = self.piece_bound(piece)
            return self.distance_upper(center, region.center, bits) + rho <= region.radius
        return self._piece_avoids_native(piece, region)

    def _piece_avoids_native(self, piece, region) -> bool:
        raise NotImplementedError

    # ---- exact helpers ----------------------------------------------------
    def complement_of_union(self, pieces) -> tuple:
        """Open regions whose union is the exact complement of the closed union."""
        raise NotImplementedError

    def intersection_empty(self, closed_regions) -> bool | None:
        """Exact emptiness of a finite intersection where decidable, else None."""
        return None

    def point_in_region(self, data, region, bits: int = 40) -> bool | None:
        """Exact membership of an ideal point in a region; None when undecided."""
        if isinstance(region, (MetricBall, AntiBall)):
            other = self.ideal_to_data(region.center)
            d = self.distance_data(data, other, bits)
            eps = Fraction(1, 1 << bits)
            if isinstance(region, AntiBall):
                if d - eps > region.radius:
                    return True
                if d + eps < region.radius:
                    return False
                return None
            if d + eps < region.radius:
                return True
            if d - eps > region.radius:
                return False
            return None
        return self._point_in_native(data, region)

    def _point_in_native(self, data, region) -> bool | None:
        raise NotImplementedError

    def sample_stream(self, stage: int):
        """Deterministic stream of ideal-point data used for witness searches.

        Yields the decoded ideal points 0..stage-1, so the stream is
        dense in the space as the stage grows.
        """
        for i in range(stage):
            yield self.ideal_to_data(i)

    def closed_ball_piece(self, data, radius: Fraction):
        """A piece containing the closed ball about data, or None if unavailable."""
        return None

    def ball_closure_complement(self, data, radius: Fraction):
        """Open regions whose union is exactly the complement of the closure
        of the basic ball about data, or None when not exactly expressible."""
        return None

    def canonical_data(self, data):
        """Canonical form of ideal-point data, so equal points compare equal."""
        return data

    def region_to_balls(self, region, stage: int) -> tuple[int, ...]:
        """Canonical ball indices whose union exhausts the open region with fuel."""
        raise NotImplementedError


def _halves(fr: Fraction) -> int:
    """Smallest m with 2^-m < fr (fr > 0)."""
    m = 0
    while Fraction(1, 1 << m) >= fr:
        m += 1
    return m


class CantorSpace(Space):
    """Sequences over finite per-level alphabets with the 2^-n metric.

    sizes(k) is the alphabet size at level k.  With uniform=True (constant
    alphabet) ideal points are the eventually constant sequences w a^inf;
    otherwise tails are padded with symbol 0.  The distance between two
    points is 2^-m where m is the first disagreement, so every basic ball
    is exactly a cylinder and all geometry here is exact.
    """

    pieces_clopen = True

    def __init__(self, sizes, uniform_size: int | None = None, labels: tuple[str, ...] | None = None):
        self.sizes = sizes
        self.uniform_size = uniform_size
        self.labels = labels
        self.diameter = Fraction(1)

    @staticmethod
    def alphabet(n: int, labels: tuple[str, ...] | None = None) -> "CantorSpace":
        if n < 2:
            raise ValueError(f"cantor alphabet needs at least 2 symbols, got {n}")
        return CantorSpace(lambda k: n, uniform_size=n, labels=labels)

    @staticmethod
    def tree(sizes) -> "CantorSpace":
        return CantorSpace(sizes)

    def label(self, sym: int) -> str:
        return self.labels[sym] if self.labels else str(sym)

    # ideal points: (word, tail symbol)
    def ideal_to_data(self, i: int):
        if self.uniform_size:
            rank, tail = divmod(i, self.uniform_size)
            return coding.word_unrank(rank, self.sizes), tail
        return coding.word_unrank(i, self.sizes), 0

    def data_to_ideal(self, data) -> int:
        word, tail = data
        rank = coding.word_rank(tuple(word), self.sizes)
        if self.uniform_size:
            return rank * self.uniform_size + tail
        if tail != 0:
            raise ValueError("tree-space ideal points have zero tails")
        return rank

    def value_at(self, data, j: int) -> int:
        word, tail = data
        return word[j] if j < len(word) else tail

    def point_name(self, i: int) -> str:
        word, tail = self.ideal_to_data(i)
        return "".join(self.label(s) for s in word) + "(" + self.label(tail) + ")*"

    def distance_data(self, a, b, bits: int) -> Fraction:
        horizon = max(len(a[0]), len(b[0]))
        for j in range(horizon):
            if self.value_at(a, j) != self.value_at(b, j):
                return Fraction(1, 1 << j)
        if a[1] != b[1]:
            return Fraction(1, 1 << horizon)
        return Fraction(0)

    # balls are cylinders
    def ball_region(self, center: int, radius: Fraction):
        k = _halves(radius) if radius <= 1 else 0
        data = self.ideal_to_data(center)
        return box_make([(j, {self.value_at(data, j)}) for j in range(k)], self.sizes)

    def cylinder(self, word) -> Box:
        return box_make([(j, {s}) for j, s in enumerate(word)], self.sizes)

    def cylinder_ball_index(self, word) -> int:
        center = self.data_to_ideal((tuple(word), 0 if not self.uniform_size else (word[-1] if word else 0)))
        radius = Fraction(2, 1 << len(word)) if word else Fraction(2)
        return coding.ball_code(center, radius)

    def root_pieces(self) -> tuple:
        return (Box(()),)

    def split_piece(self, piece: Box, hint) -> tuple:
        coord = hint
        allowed = piece.allowed(coord)
        if allowed is None:
            allowed = frozenset(range(self.sizes(coord)))
        out = []
        for s in sorted(allowed):
            child = rg.box_fix(piece, coord, s, self.sizes)
            if child != EMPTY:
                out.append(child)
        return tuple(out)

    def split_hint(self, piece: Box, live_regions):
        best = None
        for region in live_regions:
            if not isinstance(region, Box):
                continue
            for c, _ in region.entries:
                mine = piece.allowed(c)
                if mine is None or len(mine) > 1:
                    best = c if best is None else min(best, c)
        return best

    def default_hint(self, piece: Box):
        maxc = max((c for c, _ in piece.entries), default=-1)
        for j in range(maxc + 2):
            allowed = piece.allowed(j)
            if allowed is None or len(allowed) > 1:
                return j
        return maxc + 1

    def closed_ball_piece(self, data, radius: Fraction):
        if radius <= 0:
            return None
        m = 0
        while Fraction(1, 1 << m) > radius:
            m += 1
        entries = tuple((j, frozenset((self.value_at(data, j),))) for j in range(m))
        return rg.box_make(entries, self.sizes)

    def ball_closure_complement(self, data, radius: Fraction):
        if radius <= 0:
            return None
        m = _halves(radius)
        box = rg.box_make(tuple((j, frozenset((self.value_at(data, j),))) for j in range(m)),
                          self.sizes)
        return tuple(box_complement(box, self.sizes))

    def canonical_data(self, data):
        word, tail = data
        pad = tail if self.uniform_size is not None else 0
        k = len(word)
        while k > 0 and word[k - 1] == pad:
            k -= 1
        return (word[:k], tail)

    def piece_bound(self, piece: Box) -> tuple[int, Fraction]:
        maxc = max((c for c, _ in piece.entries), default=-1)
        word = []
        free = None
        for j in range(maxc + 1):
            allowed = piece.allowed(j)
            if allowed is None:
                word.append(0)
                free = j if free is None else free
            else:
                word.append(min(allowed))
                if len(allowed) > 1 and free is None:
                    free = j
        if free is None:
            free = maxc + 1
        tail = 0
        center = self.data_to_ideal((tuple(word), tail))
        return center, Fraction(1, 1 << free)

    def _piece_inside_native(self, piece: Box, region) -> bool:
        if isinstance(region, Box):
            return box_subset(piece, region)
        return False

    def _piece_avoids_native(self, piece: Box, region) -> bool:
        if isinstance(region, Box):
            return box_intersection(piece, region, self.sizes) == EMPTY
        return False

    def complement_of_union(self, pieces) -> tuple:
        parts: list = [Box(())]
        for piece in pieces:
            if not isinstance(piece, Box):
                raise TypeError(f"cantor complement needs boxes, got {piece!r}")
            comp = box_complement(piece, self.sizes)
            parts = [meet for p in parts for c in comp
                     if (meet := box_intersection(p, c, self.sizes)) != EMPTY]
        return tuple(sorted(set(parts), key=region_key))

    def intersection_empty(self, closed_regions) -> bool | None:
        meet: Box | str = Box(())
        for region in closed_regions:
            if not isinstance(region, Box):
                return None
            meet = box_intersection(meet, region, self.sizes)
            if meet == EMPTY:
                return True
        return False

    def _point_in_native(self, data, region) -> bool | None:
        if isinstance(region, Box):
            return all(self.value_at(data, c) in syms for c, syms in region.entries)
        return None

    def region_to_balls(self, region, stage: int) -> tuple[int, ...]:
        if not isinstance(region, Box):
            return ()
        maxc = max((c for c, _ in region.entries), default=-1)
        depth = maxc + 1
        budget = max(1, stage)
        words: list[tuple[int, ...]] = [()]
        for j in range(depth):
            allowed = region.allowed(j)
            syms = sorted(allowed) if allowed is not None else range(self.sizes(j))
            words = [w + (s,) for w in words for s in syms]
            if len(words) > budget:
                return ()
        return tuple(self.cylinder_ball_index(w) for w in words)


class IntervalSpace(Space):
    """The unit interval with rational ideal points and the absolute-value metric."""

    def __init__(self):
        self.diameter = Fraction(1)

    def ideal_to_data(self, i: int) -> Fraction:
        return coding.nat_to_unitrat(i)

    def data_to_ideal(self, data: Fraction) -> int:
        return coding.unitrat_to_nat(data)

    def point_name(self, i: int) -> str:
        return str(self.ideal_to_data(i))

    def distance_data(self, a: Fraction, b: Fraction, bits: int) -> Fraction:
        return abs(a - b)

    def ball_region(self, center: int, radius: Fraction):
        c = self.ideal_to_data(center)
        return Iv(c - radius, c + radius, True, True)

    def root_pieces(self) -> tuple:
        return (Iv(Fraction(0), Fraction(1), False, False),)

    def split_piece(self, piece: Iv, hint) -> tuple:
        mid = (piece.lo + piece.hi) / 2
        return (Iv(piece.lo, mid, False, False), Iv(mid, piece.hi, False, False))

    def split_hint(self, piece: Iv, live_regions):
        return 0

    def piece_bound(self, piece: Iv) -> tuple[int, Fraction]:
        mid = (piece.lo + piece.hi) / 2
        return self.data_to_ideal(mid), (piece.hi - piece.lo) / 2

    def _piece_inside_native(self, piece: Iv, region) -> bool:
        return isinstance(region, Iv) and iv_contains_closed(region, piece.lo, piece.hi)

    def _piece_avoids_native(self, piece: Iv, region) -> bool:
        if not isinstance(region, Iv):
            return False
        return iv_intersect(Iv(piece.lo, piece.hi, False, False),
                            Iv(region.lo, region.hi, region.lo_strict, region.hi_strict)) == EMPTY

    def closed_ball_piece(self, data: Fraction, radius: Fraction):
        if radius <= 0:
            return None
        return Iv(max(Fraction(0), data - radius), min(Fraction(1), data + radius), False, False)

    def ball_closure_complement(self, data: Fraction, radius: Fraction):
        if radius <= 0:
            return None
        lo, hi = max(Fraction(0), data - radius), min(Fraction(1), data + radius)
        return tuple(rg.iv_complement(Iv(lo, hi, False, False)))

    def complement_of_union(self, pieces) -> tuple:
        ivs = sorted((p for p in pieces if isinstance(p, Iv)), key=lambda p: (p.lo, p.hi))
        if len(ivs) != len(list(pieces)):
            raise TypeError("interval complement needs interval pieces")
        out = []
        cursor = Fraction(-1)
        for p in ivs:
            if p.lo > cursor:
                out.append(Iv(cursor, p.lo, True, p.lo_strict is False))
            cursor = max(cursor, p.hi)
        out.append(Iv(cursor, Fraction(2), ivs[-1].hi_strict is False if ivs else True, True))
        return tuple(p for p in out if p.lo < 1 and p.hi > 0)

    def intersection_empty(self, closed_regions) -> bool | None:
        meet: Iv | str = Iv(Fraction(0), Fraction(1), False, False)
        for region in closed_regions:
            if not isinstance(region, Iv):
                return None
            meet = iv_intersect(meet, region)
            if meet == EMPTY:
                return True
        return False

    def _point_in_native(self, data: Fraction, region) -> bool | None:
        if isinstance(region, Iv):
            lo_ok = data > region.lo or (data == region.lo and not region.lo_strict)
            hi_ok = data < region.hi or (data == region.hi and not region.hi_strict)
            return lo_ok and hi_ok
        return None

    def region_to_balls(self, region, stage: int) -> tuple[int, ...]:
        if not isinstance(region, Iv):
            return ()
        out = []
        level = 1
        while (1 << level) <= stage:
            step = Fraction(1, 1 << level)
            j = 0
            while j * step <= 1:
                c = j * step
                if iv_contains_closed(region, max(Fraction(0), c - step), min(Fraction(1), c + step)) \
                        and 0 <= c <= 1:
                    out.append(coding.ball_code(self.data_to_ideal(c), step))
                j += 1
            level += 1
        return tuple(sorted(set(out)))


class CircleSpace(Space):
    """The circle of circumference one with rational angles and arc metric."""

    def __init__(self):
        self.diameter = Fraction(1, 2)

    def ideal_to_data(self, i: int) -> Fraction:
        return coding.nat_to_circlerat(i)

    def data_to_ideal(self, data: Fraction) -> int:
        return coding.circlerat_to_nat(mod1(data))

    def point_name(self, i: int) -> str:
        return f"{self.ideal_to_data(i)} turns"

    def distance_data(self, a: Fraction, b: Fraction, bits: int) -> Fraction:
        d = mod1(a - b)
        return min(d, 1 - d)

    def ball_region(self, center: int, radius: Fraction):
        c = self.ideal_to_data(center)
        if radius > Fraction(1, 2):
            return Arc(full=True, lo_strict=False, hi_strict=False)
        return Arc(mod1(c - radius), 2 * radius, True, True)

    def root_pieces(self) -> tuple:
        return (Arc(Fraction(0), Fraction(1, 2), False, False),
                Arc(Fraction(1, 2), Fraction(1, 2), False, False))

    def split_piece(self, piece: Arc, hint) -> tuple:
        half = piece.length / 2
        return (Arc(piece.start, half, False, False),
                Arc(mod1(piece.start + half), half, False, False))

    def split_hint(self, piece: Arc, live_regions):
        return 0

    def piece_bound(self, piece: Arc) -> tuple[int, Fraction]:
        mid = mod1(piece.start + piece.length / 2)
        return self.data_to_ideal(mid), piece.length / 2

    def _piece_inside_native(self, piece: Arc, region) -> bool:
        return isinstance(region, Arc) and arc_contains_closed(region, piece.start, piece.length)

    def _piece_avoids_native(self, piece: Arc, region) -> bool:
        if not isinstance(region, Arc):
            return False
        return not arcs_intersection_nonempty([
            (piece.start, piece.length, False, False),
            (region.start, region.length, region.lo_strict, region.hi_strict)])

    def closed_ball_piece(self, data: Fraction, radius: Fraction):
        if radius <= 0 or radius >= Fraction(1, 2):
            return None
        return Arc(mod1(data - radius), 2 * radius, False, False)

    def ball_closure_complement(self, data: Fraction, radius: Fraction):
        if radius <= 0:
            return None
        if radius >= Fraction(1, 2):
            return ()
        return tuple(rg.arc_complement_closed(mod1(data - radius), 2 * radius))

    def complement_of_union(self, pieces) -> tuple:
        arcs = []
        for p in pieces:
            if not isinstance(p, Arc):
                raise TypeError("circle complement needs arcs")
            if p.full or p.length >= 1:
                return ()
            arcs.append((mod1(p.start), p.length))
        if not arcs:
            return (Arc(full=True, lo_strict=False, hi_strict=False),)
        arcs.sort()
        merged = []
        for s, ln in arcs:
            if merged and s <= merged[-1][0] + merged[-1][1]:
                ps, pl = merged[-1]
                merged[-1] = (ps, max(pl, s + ln - ps))
            else:
                merged.append((s, ln))
        # wrap merge of last into first
        if len(merged) > 1 and merged[-1][0] + merged[-1][1] >= merged[0][0] + 1:
            s, ln = merged.pop()
            fs, fl = merged[0]
            merged[0] = (s, max(ln, fs + fl + 1 - s))
        s0, l0 = merged[0]
        if l0 >= 1:
            return ()
        out = []
        for idx, (s, ln) in enumerate(merged):
            nxt = merged[(idx + 1) % len(merged)][0] + (1 if idx + 1 == len(merged) else 0)
            gap = nxt - (s + ln)
            if gap > 0:
                out.append(Arc(mod1(s + ln), gap, True, True))
        return tuple(out)

    def intersection_empty(self, closed_regions) -> bool | None:
        arcs = []
        for region in closed_regions:
            if not isinstance(region, Arc):
                return None
            if region.full:
                continue
            arcs.append((region.start, region.length, region.lo_strict, region.hi_strict))
        return not arcs_intersection_nonempty(arcs)

    def _point_in_native(self, data: Fraction, region) -> bool | None:
        if isinstance(region, Arc):
            return arc_contains_point(region, data)
        return None

    def region_to_balls(self, region, stage: int) -> tuple[int, ...]:
        if not isinstance(region, Arc):
            return ()
        out = []
        level = 2
        while (1 << level) <= stage:
            step = Fraction(1, 1 << level)
            for j in range(1 << level):
                c = j * step
                if arc_contains_closed(region, mod1(c - step), 2 * step):
                    out.append(coding.ball_code(self.data_to_ideal(c), step))
            level += 1
        return tuple(sorted(set(out)))


class ProductSpace(Space):
    """Countable product with metric sum of 2^-i times component distances.

    components may be a finite list of spaces, or a single space with
    copies=None for the full countable power.  Ideal points deviate from
    the all-default point (component ideal index zero) in finitely many
    coordinates.
    """

    def __init__(self, components=None, uniform=None):
        if (components is None) == (uniform is None):
            raise ValueError("give either a component list or a uniform component")
        self._components = list(components) if components is not None else None
        self._uniform = uniform
        if self._components is not None:
            self.diameter = sum(Fraction(1, 1 << i) * c.diameter
                                for i, c in enumerate(self._components))
        else:
            self.diameter = 2 * uniform.diameter

    @property
    def finite(self) -> bool:
        return self._components is not None

    @property
    def width(self) -> int | None:
        return len(self._components) if self.finite else None

    @property
    def pieces_clopen(self) -> bool:
        if self.finite:
            return all(c.pieces_clopen for c in self._components)
        return self._uniform.pieces_clopen

    def component(self, i: int) -> Space:
        if self.finite:
            return self._components[i]
        return self._uniform

    def weight(self, i: int) -> Fraction:
        return Fraction(1, 1 << i)

    def _tail_diameter(self, constrained) -> Fraction:
        """Sum of weighted component diameters over unconstrained coordinates."""
        if self.finite:
            return sum((self.weight(i) * self.component(i).diameter
                        for i in range(self.width) if i not in constrained), Fraction(0))
        total = 2 * self._uniform.diameter
        for i in constrained:
            total -= self.weight(i) * self._uniform.diameter
        return total

    # data: finite -> tuple of component data; countable -> dict {i: data}
    def data_component(self, data, i: int):
        if self.finite:
            return data[i]
        return data.get(i, self._uniform.ideal_to_data(0))

    def ideal_to_data(self, n: int):
        if self.finite:
            idxs = []
            for _ in range(self.width - 1):
                i, n = coding.unpair(n)
                idxs.append(i)
            idxs.append(n)
            return tuple(self.component(k).ideal_to_data(ix) for k, ix in enumerate(idxs))
        lst = coding.nat_to_list(n)
        return {i: self._uniform.ideal_to_data(ix) for i, ix in enumerate(lst) if ix != 0}

    def data_to_ideal(self, data) -> int:
        if self.finite:
            idxs = [self.component(k).data_to_ideal(data[k]) for k in range(self.width)]
            n = idxs[-1]
            for ix in reversed(idxs[:-1]):
                n = coding.pair(ix, n)
            return n
        if not data:
            return 0
        top = max(data)
        lst = [self._uniform.data_to_ideal(self.data_component(data, i)) for i in range(top + 1)]
        while lst and lst[-1] == 0:
            lst.pop()
        return coding.list_to_nat(lst)

    def point_name(self, n: int) -> str:
        data = self.ideal_to_data(n)
        if self.finite:
            return "(" + ", ".join(self.component(i).point_name(self.component(i).data_to_ideal(data[i]))
                                   for i in range(self.width)) + ")"
        return repr({i: self._uniform.point_name(self._uniform.data_to_ideal(v))
                     for i, v in sorted(data.items())})

    def distance_data(self, a, b, bits: int) -> Fraction:
        if self.finite:
            support = range(self.width)
        else:
            support = sorted(set(a) | set(b))
        total = Fraction(0)
        for i in support:
            da, db = self.data_component(a, i), self.data_component(b, i)
            total += self.weight(i) * self.component(i).distance_data(da, db, bits + i + 2)
        return total

    def root_pieces(self) -> tuple:
        return (PBox(()),)

    def _pbox_with(self, pbox: PBox, i: int, part) -> PBox:
        entries = tuple((c, r) for c, r in pbox.entries if c != i) + ((i, part),)
        return PBox(tuple(sorted(entries, key=lambda e: e[0])))

    def split_piece(self, piece: PBox, hint) -> tuple:
        comp, inner = hint
        space = self.component(comp)
        part = piece.component(comp)
        if part is None:
            return tuple(self._pbox_with(piece, comp, root) for root in space.root_pieces())
        if inner is None:
            inner = space.default_hint(part)
        return tuple(self._pbox_with(piece, comp, child)
                     for child in space.split_piece(part, inner))

    def default_hint(self, piece: PBox):
        # split whichever coordinate currently contributes most slack, so
        # default refinement round-robins across components
        constrained = {c for c, _ in piece.entries}
        horizon = self.width if self.finite else (max(constrained, default=-1) + 2)
        best, contrib = 0, Fraction(-1)
        for i in range(horizon):
            part = piece.component(i)
            if part is None:
                c = self.weight(i) * self.component(i).diameter
            else:
                _, rho = self.component(i).piece_bound(part)
                c = self.weight(i) * rho
            if c > contrib:
                best, contrib = i, c
        part = piece.component(best)
        return (best, None if part is None else self.component(best).default_hint(part))

    def split_hint(self, piece: PBox, live_regions):
        native = [r for r in live_regions if isinstance(r, PBox)]
        for region in sorted(native, key=region_key):
            for comp, reg in region.entries:
                part = piece.component(comp)
                if part is None:
                    return (comp, None)
                space = self.component(comp)
                if not space.piece_inside(part, reg, 40):
                    inner = space.split_hint(part, [reg])
                    return (comp, inner if inner is not None else space.default_hint(part))
        if any(isinstance(r, (MetricBall, AntiBall)) for r in live_regions):
            constrained = {c for c, _ in piece.entries}
            best, contrib = None, Fraction(-1)
            horizon = self.width if self.finite else (max(constrained, default=-1) + 2)
            for i in range(horizon):
                part = piece.component(i)
                if part is None:
                    c = self.weight(i) * self.component(i).diameter
                else:
                    _, rho = self.component(i).piece_bound(part)
                    c = self.weight(i) * rho
                if c > contrib:
                    best, contrib = i, c
            if best is not None and contrib > 0:
                part = piece.component(best)
                space = self.component(best)
                return (best, None if part is None else space.default_hint(part))
        return None

    def piece_bound(self, piece: PBox) -> tuple[int, Fraction]:
        constrained = {c for c, _ in piece.entries}
        radius = self._tail_diameter(constrained)
        if self.finite:
            parts = []
            for i in range(self.width):
                part = piece.component(i)
                if part is None:
                    parts.append(self.component(i).ideal_to_data(0))
                else:
                    idx, rho = self.component(i).piece_bound(part)
                    parts.append(self.component(i).ideal_to_data(idx))
                    radius += self.weight(i) * rho
            return self.data_to_ideal(tuple(parts)), radius
        data = {}
        for i, part in piece.entries:
            idx, rho = self._uniform.piece_bound(part)
            d = self._uniform.ideal_to_data(idx)
            if idx != 0:
                data[i] = d
            radius += self.weight(i) * rho
        return self.data_to_ideal(data), radius

    def _piece_inside_native(self, piece: PBox, region) -> bool:
        if not isinstance(region, PBox):
            return False
        for comp, reg in region.entries:
            part = piece.component(comp)
            space = self.component(comp)
            if part is None:
                if not all(space.piece_inside(root, reg, 40) for root in space.root_pieces()):
                    return False
            elif not space.piece_inside(part, reg, 40):
                return False
        return True

    def _piece_avoids_native(self, piece: PBox, region) -> bool:
        if not isinstance(region, PBox):
            return False
        for comp, reg in region.entries:
            part = piece.component(comp)
            if part is not None and self.component(comp).piece_avoids(part, reg, 40):
                return True
        return False

    def _point_in_native(self, data, region) -> bool | None:
        if not isinstance(region, PBox):
            return None
        verdict = True
        for comp, reg in region.entries:
            r = self.component(comp).point_in_region(self.data_component(data, comp), reg)
            if r is False:
                return False
            if r is None:
                verdict = None
        return verdict

    def canonical_data(self, data):
        if self.finite:
            return tuple(self.component(i).canonical_data(data[i]) for i in range(self.width))
        out = {}
        default = self._uniform.canonical_data(self._uniform.ideal_to_data(0))
        for i, v in data.items():
            cv = self._uniform.canonical_data(v)
            if cv != default:
                out[i] = cv
        return out

    def region_to_balls(self, region, stage: int) -> tuple[int, ...]:
        if not isinstance(region, PBox):
            return ()
        out = []
        level = 1
        while (1 << level) <= stage and level <= 12:
            radius = Fraction(1, 1 << level)
            for data in itertools.islice(self.sample_stream(stage), 1 << min(level, 6)):
                ok = True
                for comp, reg in region.entries:
                    space = self.component(comp)
                    inner = radius / self.weight(comp)
                    piece = space.closed_ball_piece(self.data_component(data, comp), inner)
                    if piece is None or not space.piece_inside(piece, reg, 20 + level):
                        ok = False
                        break
                if ok:
                    out.append(coding.ball_code(self.data_to_ideal(data), radius))
            level += 1
        return tuple(sorted(set(out)))


class DiskCirclesSpace(Space):
    """Disjoint circles of radius 1/n about the origin, plus the origin, in the plane.

    Points on the circles are stored as (n, angle in turns); the plane
    embedding only enters through the chord-length metric, bracketed by
    rational trigonometric bounds.  The circle index set is finite, so
    the origin is an isolated point of the carrier.
    """

    def __init__(self, ns):
        self.ns = tuple(sorted(set(int(n) for n in ns)))
        if not self.ns or self.ns[0] < 1:
            raise ValueError(f"circle indices must be positive integers, got {ns}")
        self.diameter = Fraction(2, self.ns[0])

    def ideal_to_data(self, i: int):
        if i == 0:
            return None
        angle_idx, pos = divmod(i - 1, len(self.ns))
        return (self.ns[pos], coding.nat_to_circlerat(angle_idx))

    def data_to_ideal(self, data) -> int:
        if data is None:
            return 0
        n, angle = data
        pos = self.ns.index(n)
        return 1 + coding.circlerat_to_nat(mod1(angle)) * len(self.ns) + pos

    def point_name(self, i: int) -> str:
        data = self.ideal_to_data(i)
        if data is None:
            return "origin"
        return f"circle 1/{data[0]} at {data[1]} turns"

    def distance_data(self, a, b, bits: int) -> Fraction:
        if a is None and b is None:
            return Fraction(0)
        if a is None or b is None:
            n, _ = b if a is None else a
            return Fraction(1, n)
        n, theta = a
        m, phi = b
        if n == m and mod1(theta - phi) == 0:
            return Fraction(0)
        cl, ch = cos_turn_bounds(theta - phi, 2 * bits + 8)
        base = Fraction(1, n * n) + Fraction(1, m * m)
        sq_lo = max(Fraction(0), base - 2 * ch / (n * m))
        sq_hi = base - 2 * cl / (n * m)
        lo = sqrt_bounds(sq_lo, bits + 4)[0]
        hi = sqrt_bounds(sq_hi, bits + 4)[1]
        return (lo + hi) / 2

    def root_pieces(self) -> tuple:
        halves = []
        for n in self.ns:
            halves.append(RingArc(n, Arc(Fraction(0), Fraction(1, 2), False, False)))
            halves.append(RingArc(n, Arc(Fraction(1, 2), Fraction(1, 2), False, False)))
        return (OriginPt(),) + tuple(halves)

    def split_piece(self, piece, hint) -> tuple:
        if isinstance(piece, OriginPt):
            return (piece,)
        half = piece.arc.length / 2
        return (RingArc(piece.n, Arc(piece.arc.start, half, False, False)),
                RingArc(piece.n, Arc(mod1(piece.arc.start + half), half, False, False)))

    def default_hint(self, piece):
        return 0

    def split_hint(self, piece, live_regions):
        if isinstance(piece, OriginPt):
            return None
        return 0

    def piece_bound(self, piece) -> tuple[int, Fraction]:
        if isinstance(piece, OriginPt):
            return 0, Fraction(0)
        mid = mod1(piece.arc.start + piece.arc.length / 2)
        ph = pi_bounds(12)[1]
        return self.data_to_ideal((piece.n, mid)), ph * piece.arc.length / piece.n

    def _piece_inside_native(self, piece, region) -> bool:
        if isinstance(piece, OriginPt):
            return isinstance(region, OriginPt)
        if isinstance(region, RingArc):
            return piece.n == region.n and arc_contains_closed(region.arc, piece.arc.start, piece.arc.length)
        return False

    def _piece_avoids_native(self, piece, region) -> bool:
        if isinstance(piece, OriginPt):
            return isinstance(region, RingArc)
        if isinstance(region, OriginPt):
            return True
        if isinstance(region, RingArc):
            if piece.n != region.n:
                return True
            return not arcs_intersection_nonempty([
                (piece.arc.start, piece.arc.length, False, False),
                (region.arc.start, region.arc.length, region.arc.lo_strict, region.arc.hi_strict)])
        return False

    def intersection_empty(self, closed_regions) -> bool | None:
        ring = None
        arcs = []
        for region in closed_regions:
            if isinstance(region, OriginPt):
                if any(isinstance(r, RingArc) for r in closed_regions):
                    return True
                continue
            if not isinstance(region, RingArc):
                return None
            if ring is None:
                ring = region.n
            elif ring != region.n:
                return True
            arcs.append((region.arc.start, region.arc.length, region.arc.lo_strict, region.arc.hi_strict))
        if not arcs:
            return False
        return not arcs_intersection_nonempty(arcs)

    def _point_in_native(self, data, region) -> bool | None:
        if isinstance(region, OriginPt):
            return data is None
        if isinstance(region, RingArc):
            return data is not None and data[0] == region.n and arc_contains_point(region.arc, data[1])
        return None

    def canonical_data(self, data):
        if data is None:
            return None
        return (data[0], mod1(data[1]))

    def _separation(self, n: int) -> Fraction:
        gaps = [Fraction(1, n)]
        for m in self.ns:
            if m != n:
                gaps.append(abs(Fraction(1, n) - Fraction(1, m)))
        return min(gaps)

    def closed_ball_piece(self, data, radius: Fraction):
        if data is None:
            return OriginPt() if radius < self._separation(self.ns[-1]) else None
        n, theta = data
        if radius >= self._separation(n):
            return None
        span = radius * n / 4
        if span >= Fraction(1, 2):
            return None
        return RingArc(n, Arc(mod1(theta - span), 2 * span, False, False))

    def region_to_balls(self, region, stage: int) -> tuple[int, ...]:
        if isinstance(region, OriginPt):
            r = self._separation(self.ns[-1]) / 2
            return (coding.ball_code(0, r),) if stage >= 1 else ()
        if not isinstance(region, RingArc):
            return ()
        out = []
        level = 2
        while (1 << level) <= stage and level <= 12:
            radius = Fraction(1, 1 << level)
            for data in itertools.islice(self.sample_stream(stage), 1 << min(level, 6)):
                piece = self.closed_ball_piece(data, radius)
                if piece is not None and self._piece_inside_native(piece, region):
                    out.append(coding.ball_code(self.data_to_ideal(data), radius))
            level += 1
        return tuple(sorted(set(out)))
