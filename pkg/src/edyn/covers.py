"""Effective covers of recursively compact carriers.

A cover is a finite family of pieces, each the intersection of finitely
many closed metric balls, together with a semi-decision that the pieces
exhaust the carrier.  On top of covers this module builds the symbolic
side of a dynamical system: pattern sets (points whose orbit visits a
prescribed piece at each word of a finite support) and the enumerator of
patterns certified never to occur.
"""

import itertools
from fractions import Fraction

from .groups import PatternCoding
from .kernel.fuel import Enumerator, NeedsMoreFuel, SemiDecision
from .kernel.maps import ComputableMap, map_compose
from .kernel.regions import (EMPTY, Arc, Box, Iv, box_intersection, iv_intersect,
                             mod1)
from .kernel.sets import EffClosedSet, RecCompactSet, semi_decide_empty
from .kernel.space import CantorSpace


class CoverPiece:
    """One piece: intersection of closed balls, with an open inner proxy.

    closed is the effectively closed intersection of the ball closures;
    open_regions are regions contained in the piece whose union stands in
    for it inside covering certificates.
    """

    def __init__(self, balls, closed: EffClosedSet, open_regions):
        self.balls = tuple(balls)
        self.closed = closed
        self.open_regions = tuple(open_regions)

    def __repr__(self):
        return f"CoverPiece({self.closed.name!r}, {len(self.balls)} balls)"


def _ball_closed(space, balls, name: str = "") -> EffClosedSet:
    """Closure of an intersection of open balls as an effectively closed set."""
    comp_items = []
    closed_regions = []
    untestable = False
    for data, radius in balls:
        if radius <= 0:
            raise ValueError(f"cover ball needs a positive radius, got {radius}")
        comp = space.ball_closure_complement(data, radius)
        if comp is None:
            raise ValueError(f"space cannot complement the closure of a "
                             f"radius {radius} ball")
        if comp == ():
            # ball closure is the whole space, no constraint
            continue
        comp_items.extend(comp)
        region = space.closed_ball_piece(data, radius)
        if region is None:
            untestable = True
        else:
            closed_regions.append(region)

    def membership(data, bits):
        # exact only: True needs every constraint verified, False needs one refuted
        verdict = None if untestable else True
        for region in closed_regions:
            v = space.point_in_region(data, region, bits)
            if v is False:
                return False
            if v is not True:
                verdict = None
        return verdict

    return EffClosedSet.from_complement_items(space, tuple(comp_items),
                                              name=name, membership=membership)


class EffectiveCover:
    """Finite cover of a recursively compact carrier by closed pieces.

    certificate records whether the pieces were verified to cover the
    carrier.  parents, when present, maps each piece to the index of a
    piece of the previous cover in a refinement chain that contains it.
    """

    def __init__(self, carrier: RecCompactSet, pieces, certificate: SemiDecision,
                 level: int = 0, parents=None):
        self.carrier = carrier
        self.pieces = tuple(pieces)
        self.certificate = certificate
        self.level = level
        self.parents = None if parents is None else tuple(parents)

    @property
    def space(self):
        return self.carrier.space

    def open_items(self) -> tuple:
        return tuple(r for p in self.pieces for r in p.open_regions)

    def piece_diameter_bound(self, i: int, bits: int = 20) -> Fraction:
        """Upper bound on the diameter of piece i.

        Any two points of the piece lie within every ball, so each pair
        of balls bounds their distance by r_j + d(c_j, c_k) + r_k; the
        minimum over pairs (including j = k) is still an upper bound.
        """
        space = self.space
        eps = Fraction(1, 1 << bits)
        best = None
        for cj, rj in self.pieces[i].balls:
            for ck, rk in self.pieces[i].balls:
                bound = space.distance_data(cj, ck, bits) + eps + rj + rk
                if best is None or bound < best:
                    best = bound
        return best

    def __repr__(self):
        status = "covers" if self.certificate else "uncertified"
        return f"EffectiveCover({len(self.pieces)} pieces, level {self.level}, {status})"


def _exact_union_certificate(space, pieces):
    """Exact covering certificate for single-ball pieces, or None.

    Needed for covers by closed balls whose interiors do not cover: the
    open proxies can never certify those, but the complement of the
    closed union may still be exactly computable and empty.
    """
    regions = []
    for piece in pieces:
        if len(piece.balls) != 1:
            return None
        (data, radius), = piece.balls
        if space.ball_closure_complement(data, radius) == ():
            return SemiDecision.accept(1)
        region = space.closed_ball_piece(data, radius)
        if region is None:
            return None
        regions.append(region)
    try:
        leftover = space.complement_of_union(regions)
    except NotImplementedError:
        return None
    if leftover == ():
        return SemiDecision.accept(1)
    return None


def cover_from_balls(carrier: RecCompactSet, balls, fuel: int) -> EffectiveCover:
    """Cover the carrier by closed balls, one piece per (center data, radius).

    Certification tries the exact route (empty complement of the closed
    union) first, then runs the open balls through the carrier's cover
    acceptor with the given fuel.  The cover is returned either way;
    callers inspect cover.certificate.
    """
    space = carrier.space
    pieces = []
    for data, radius in balls:
        data = space.canonical_data(data)
        closed = _ball_closed(space, ((data, radius),), name=f"ball at {data!r}")
        opens = (space.ball_region(space.data_to_ideal(data), radius),)
        pieces.append(CoverPiece(((data, radius),), closed, opens))
    if not pieces:
        raise ValueError("a cover needs at least one ball")
    certificate = _exact_union_certificate(space, pieces)
    if certificate is None:
        certificate = carrier.accepts([r for p in pieces for r in p.open_regions],
                                      fuel)
    return EffectiveCover(carrier, pieces, certificate)


# ------------------------------------------------------------ refinement

def refine_cover_sequence(carrier: RecCompactSet, n: int, *, zero_dim: bool = False,
                          fuel: int) -> EffectiveCover:
    """Cover number n of a nested refinement sequence of the carrier.

    Level 0 is coarse and each later level refines the one before it:
    every piece records a parent piece that contains it, and piece
    diameter bounds halve with the level.  The chain is memoized on the
    carrier, so repeated calls extend a single sequence.

    zero_dim picks the clopen cylinder refinement and demands a Cantor
    carrier; otherwise ideal centers are swept with halving radii.
    Raises NeedsMoreFuel when a level cannot be certified.
    """
    if n < 0:
        raise ValueError(f"cover index must be nonnegative, got {n}")
    space = carrier.space
    if zero_dim and not isinstance(space, CantorSpace):
        raise ValueError(f"clopen refinement needs a Cantor space, "
                         f"got {type(space).__name__}")
    chains = getattr(carrier, "_cover_chains", None)
    if chains is None:
        chains = {}
        carrier._cover_chains = chains
    chain = chains.setdefault("zero" if zero_dim else "metric", [])
    while len(chain) <= n:
        level = len(chain)
        if zero_dim:
            chain.append(_refine_cylinders(carrier, chain, level, fuel))
        else:
            chain.append(_refine_metric(carrier, chain, level, fuel))
    return chain[n]


def _cylinder_radius(depth: int) -> Fraction:
    # 2^-depth < 3/2^(depth+1) < 2^(1-depth): the open ball, the closed
    # ball, and the ball closure all equal the depth-deep cylinder
    return Fraction(3, 1 << (depth + 1))


def _refine_cylinders(carrier, chain, level, fuel):
    space = carrier.space
    radius = _cylinder_radius(level)
    if level == 0:
        candidates = [((), None)]
    else:
        candidates = []
        for j, piece in enumerate(chain[level - 1].pieces):
            (data, _), = piece.balls
            for sym in range(space.sizes(level - 1)):
                candidates.append((data[0] + (sym,), j))
    pieces, parents = [], []
    for word, parent in candidates:
        data = (word, 0)
        label = "".join(str(s) for s in word) if word else "root"
        closed = _ball_closed(space, ((data, radius),), name=f"cylinder {label}")
        if level > 0 and semi_decide_empty(closed, carrier, fuel):
            continue
        opens = (space.ball_region(space.data_to_ideal(data), radius),)
        pieces.append(CoverPiece(((data, radius),), closed, opens))
        parents.append(parent)
    certificate = carrier.accepts([r for p in pieces for r in p.open_regions], fuel)
    if not certificate:
        raise NeedsMoreFuel(f"cylinder cover at depth {level} not certified "
                            f"with fuel {fuel}")
    return EffectiveCover(carrier, pieces, certificate, level=level,
                          parents=None if level == 0 else parents)


def _refine_metric(carrier, chain, level, fuel):
    space = carrier.space
    radius = Fraction(1, 1 << (level + 1))
    prev = chain[level - 1] if level else None
    bits = 20
    eps = Fraction(1, 1 << bits)
    pieces, parents = [], []
    seen = set()
    certificate = None
    cap = max(64, fuel)
    for i in range(cap):
        data = space.canonical_data(space.ideal_to_data(i))
        if data in seen:
            continue
        seen.add(data)
        parent = None
        if prev is not None:
            for j, pp in enumerate(prev.pieces):
                (pd, pr), = pp.balls
                # strict: the closed child ball sits inside the open parent ball
                if space.distance_data(data, pd, bits) + eps + radius < pr:
                    parent = j
                    break
            if parent is None:
                continue
        closed = _ball_closed(space, ((data, radius),), name=f"ball at {data!r}")
        opens = (space.ball_region(space.data_to_ideal(data), radius),)
        pieces.append(CoverPiece(((data, radius),), closed, opens))
        parents.append(parent)
        verdict = carrier.accepts([r for p in pieces for r in p.open_regions], fuel)
        if verdict:
            certificate = verdict
            break
    if certificate is None:
        raise NeedsMoreFuel(f"no covering ball family found at level {level} "
                            f"with fuel {fuel}")
    # drop redundant balls, newest first, keeping the family covering
    keep = list(range(len(pieces)))
    for i in reversed(range(len(pieces))):
        trial = [k for k in keep if k != i]
        items = [r for k in trial for r in pieces[k].open_regions]
        if items:
            verdict = carrier.accepts(items, fuel)
            if verdict:
                keep = trial
                certificate = verdict
    pieces = [pieces[k] for k in keep]
    parents = [parents[k] for k in keep]
    return EffectiveCover(carrier, pieces, certificate, level=level,
                          parents=None if level == 0 else parents)


# ------------------------------------------------------------------ joins

def _arc_intersections(a: Arc, b: Arc) -> tuple:
    """Exact intersection of two arcs: zero, one, or two arcs."""
    if a.full or a.length >= 1:
        return (b,)
    if b.full or b.length >= 1:
        return (a,)
    ps, pl, plos, phis = mod1(a.start), a.length, a.lo_strict, a.hi_strict
    s, ln, los, his = mod1(b.start), b.length, b.lo_strict, b.hi_strict
    out = []
    delta = mod1(s - ps)
    # overlap of [0, pl] with [delta, delta + ln] on the line, two unwrappings
    for off in (delta, delta - 1):
        lo = max(Fraction(0), off)
        hi = min(pl, off + ln)
        if lo > hi:
            continue
        lo_strict = (plos and lo == 0) or (los and lo == off)
        hi_strict = (phis and hi == pl) or (his and hi == off + ln)
        if lo == hi and (lo_strict or hi_strict):
            continue
        out.append(Arc(mod1(ps + lo), hi - lo, lo_strict, hi_strict))
    return tuple(out)


def _region_intersections(space, a, b) -> tuple:
    if isinstance(a, Box) and isinstance(b, Box):
        meet = box_intersection(a, b, space.sizes)
        return () if meet == EMPTY else (meet,)
    if isinstance(a, Iv) and isinstance(b, Iv):
        meet = iv_intersect(a, b)
        return () if meet == EMPTY else (meet,)
    if isinstance(a, Arc) and isinstance(b, Arc):
        return _arc_intersections(a, b)
    raise ValueError(f"cannot intersect cover regions {a!r} and {b!r}")


def join_covers(a: EffectiveCover, b: EffectiveCover,
                prune_fuel: int | None = None) -> EffectiveCover:
    """Common refinement: all pairwise intersections of pieces.

    Pieces are never dropped just because their open proxies miss each
    other; two closed pieces can still share boundary points.  Pass
    prune_fuel to discard pairs whose intersection is certified empty.
    """
    if a.carrier is not b.carrier:
        raise ValueError(f"joined covers live on different carriers: "
                         f"{a!r} vs {b!r}")
    space = a.space
    pieces = []
    for i, pa in enumerate(a.pieces):
        for j, pb in enumerate(b.pieces):
            closed = pa.closed.intersect(pb.closed, name=f"{i} meet {j}")
            opens = [r for ra in pa.open_regions for rb in pb.open_regions
                     for r in _region_intersections(space, ra, rb)]
            pieces.append(CoverPiece(pa.balls + pb.balls, closed, opens))
    if prune_fuel is not None:
        pieces = [p for p in pieces
                  if not semi_decide_empty(p.closed, a.carrier, prune_fuel)]
    if a.certificate and b.certificate:
        certificate = SemiDecision.accept(max(a.certificate.at_fuel or 1,
                                              b.certificate.at_fuel or 1))
    else:
        certificate = SemiDecision.undetermined()
    return EffectiveCover(a.carrier, pieces, certificate,
                          level=max(a.level, b.level))


# --------------------------------------------------------- pattern sets

def preimage_closed(m: ComputableMap, closed: EffClosedSet,
                    name: str = "") -> EffClosedSet:
    """Preimage of an effectively closed set under a computable map."""
    if closed.space is not m.dst:
        raise ValueError(f"closed set {closed.name!r} not on the target "
                         f"of {m.name!r}")
    comp = m.preimage_open(closed.complement_open())
    membership = None
    if m.has_apply:
        def membership(data, bits):
            return closed.membership_test(m.apply_data(data), bits)
    return EffClosedSet(m.src, comp.enum,
                        name=name or f"{m.name} pulls back {closed.name}",
                        membership=membership)


def _word_map(maps, word):
    out = maps[word[-1]]
    for letter in reversed(word[:-1]):
        # word (s1 .. sk) acts by f_s1 after ... after f_sk
        out = map_compose(out, maps[letter])
    return out


def dp_set(pattern: PatternCoding, maps, cover: EffectiveCover,
           name: str = "") -> EffClosedSet:
    """Points whose orbit realizes the pattern against the cover.

    The pattern assigns a piece index to each support word; a point
    belongs to the set when for every entry (word, i) the composition of
    the letter maps along the word sends it into piece i.  Emptiness of
    this set inside the carrier certifies the pattern as forbidden.
    """
    parts = []
    for word, idx in pattern.entries:
        if not 0 <= idx < len(cover.pieces):
            raise ValueError(f"pattern symbol {idx} outside the "
                             f"{len(cover.pieces)} cover pieces")
        for letter in word:
            if letter not in maps:
                raise ValueError(f"pattern letter {letter!r} has no map")
        piece = cover.pieces[idx].closed
        if word:
            parts.append(preimage_closed(_word_map(maps, word), piece))
        else:
            parts.append(piece)
    if not parts:
        return EffClosedSet.whole(cover.space, name=name or "empty pattern")
    out = parts[0]
    for part in parts[1:]:
        out = out.intersect(part)
    if name:
        out.name = name
    return out


def subshift_cover_forbidden(maps, cover: EffectiveCover, radius: int, letters=None,
                             ambient: RecCompactSet | None = None) -> Enumerator:
    """Enumerate patterns certified absent from the cover's symbolic coding.

    Supports are all words of length at most radius over the letters
    (defaults to every map); patterns are the total piece assignments on
    that support.  A pattern is emitted once its dp_set is certified
    empty in the ambient compact set (default: the cover's carrier).
    """
    if radius < 0:
        raise ValueError(f"pattern radius must be nonnegative, got {radius}")
    if letters is None:
        letters = tuple(sorted(maps))
    supports = [()]
    for length in range(1, radius + 1):
        supports.extend(itertools.product(letters, repeat=length))
    patterns = [PatternCoding(tuple(zip(supports, assign)))
                for assign in itertools.product(range(len(cover.pieces)),
                                                repeat=len(supports))]
    amb = ambient if ambient is not None else cover.carrier
    sets = {}

    def dp_for(pattern):
        if pattern not in sets:
            sets[pattern] = dp_set(pattern, maps, cover)
        return sets[pattern]

    def probe(t):
        budget = 1 << (t.bit_length() // 2)
        return [p for p in patterns if semi_decide_empty(dp_for(p), amb, budget)]

    return Enumerator(probe, label=f"forbidden radius {radius} patterns")
