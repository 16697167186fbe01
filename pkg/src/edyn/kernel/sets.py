"""Effective set hierarchy over computable metric spaces.

Three presentations, mirroring the classical equivalences:

* EffOpenSet: a fuel-monotone enumerator of open items (basic-ball
  indices or exact open regions); the set is the union.
* EffClosedSet: an enumerator of open items exhausting the complement,
  plus an optional exact membership hook used for refutation shortcuts.
* RecCompactSet: a total acceptor semi-deciding "this finite family of
  open items covers the set".

The acceptor is driven by a piece-covering engine: closed pieces of the
space are discharged when certified inside some open item, split along
a hint otherwise, with the whole attempt bounded by the stage budget.
Certificates are exact region checks where the space supports them and
conservative metric-ball estimates otherwise, so acceptance is sound at
every fuel and complete in the limit.
"""

from __future__ import annotations

import itertools
from collections import deque
from fractions import Fraction

from .. import coding
from .fuel import Enumerator, Refuted, SemiDecision, StagedQuery
from .regions import AntiBall, EMPTY, MetricBall, PBox, region_key


def approx_distance(space, i: int, j: int, bits: int) -> Fraction:
    """Distance between ideal points i and j within 2^-bits, as an exact rational."""
    for name, idx in (("i", i), ("j", j)):
        if not isinstance(idx, int) or idx < 0:
            raise ValueError(f"invalid ideal point index {name}={idx!r}")
    if bits < 0:
        raise ValueError(f"precision must be nonnegative, got {bits}")
    return space.distance(i, j, bits)


def _stage_bits(stage: int) -> int:
    return stage.bit_length() + 6


def covers_within(space, regions, stage: int, pieces=None) -> bool:
    """Certify that the closed pieces are covered by the open regions within budget.

    Pieces not yet certified inside some region are split along the
    space's hint; the attempt fails when the budget (one unit per piece
    visit) runs out, when a piece certifiably avoids every region, or
    when an uncovered piece cannot be split further.
    """
    regs = sorted((r for r in regions if r != EMPTY), key=region_key)
    bits = _stage_bits(stage)
    work = deque(space.root_pieces() if pieces is None else pieces)
    budget = stage
    while work:
        if budget <= 0:
            return False
        budget -= 1
        piece = work.popleft()
        live = [r for r in regs if not space.piece_avoids(piece, r, bits)]
        if any(space.piece_inside(piece, r, bits) for r in live):
            continue
        if not live:
            return False
        hint = space.split_hint(piece, live)
        if hint is None and any(isinstance(r, (MetricBall, AntiBall)) for r in live):
            hint = space.default_hint(piece)
        if hint is None:
            return False
        children = space.split_piece(piece, hint)
        if children == (piece,):
            return False
        work.extend(children)
    return True


def _canonical_items_key(regions) -> tuple:
    return tuple(sorted(map(region_key, regions)))


class EffOpenSet:
    """Effectively open set: the union of a monotone stream of open items."""

    def __init__(self, space, enum: Enumerator, name: str = ""):
        self.space = space
        self.enum = enum
        self.name = name
        self._point_queries: dict = {}

    def items(self, fuel: int) -> tuple:
        """Raw open items emitted within fuel, deterministically ordered."""
        out = self.enum.emit(fuel)
        return tuple(sorted(out, key=lambda it: (0, it, ()) if isinstance(it, int)
                            else (1,) + region_key(it)))

    def regions(self, fuel: int) -> tuple:
        regs = []
        for it in self.items(fuel):
            r = self.space.normalize_item(it)
            if r != EMPTY:
                regs.append(r)
        return tuple(regs)

    def contains_point(self, data, fuel: int) -> SemiDecision:
        """Semi-decide membership of an ideal point's data in the union."""
        key = region_key(self.space.normalize_item(self.space.data_to_ideal(data))) \
            if isinstance(data, int) else ("data", repr(data))
        q = self._point_queries.get(key)
        if q is None:
            def check(t, data=data):
                bits = _stage_bits(t)
                for region in self.regions(t):
                    if self.space.point_in_region(data, region, bits) is True:
                        return (region,)
                return None
            q = self._point_queries[key] = StagedQuery(check)
        return q.query(fuel)

    @staticmethod
    def fixed(space, items, name: str = "") -> "EffOpenSet":
        return EffOpenSet(space, Enumerator.fixed(items), name=name)

    @staticmethod
    def union(space, opens, name: str = "") -> "EffOpenSet":
        return EffOpenSet(space, Enumerator.union([o.enum for o in opens]), name=name)


class EffClosedSet:
    """Effectively closed set, presented by an enumeration of its complement.

    membership, when given, must be an exact certificate: it returns
    True or False only when certain (e.g. by exact rational evaluation)
    and None otherwise.  It is used to refute emptiness permanently.
    """

    def __init__(self, space, complement_enum: Enumerator, name: str = "",
                 membership=None):
        self.space = space
        self.complement_enum = complement_enum
        self.name = name
        self._membership = membership
        self._empty_queries: dict = {}

    def complement_items(self, fuel: int) -> tuple:
        out = self.complement_enum.emit(fuel)
        return tuple(sorted(out, key=lambda it: (0, it, ()) if isinstance(it, int)
                            else (1,) + region_key(it)))

    def complement_regions(self, fuel: int) -> tuple:
        regs = []
        for it in self.complement_items(fuel):
            r = self.space.normalize_item(it)
            if r != EMPTY:
                regs.append(r)
        return tuple(regs)

    def complement_balls(self, fuel: int) -> tuple[int, ...]:
        """Ball-index view of the complement enumeration."""
        out = []
        for it in self.complement_items(fuel):
            if isinstance(it, int):
                out.append(it)
            else:
                out.extend(self.space.region_to_balls(it, fuel))
        return tuple(sorted(set(out)))

    def complement_open(self, name: str = "") -> EffOpenSet:
        return EffOpenSet(self.space, self.complement_enum,
                          name=name or (self.name and f"complement of {self.name}"))

    def membership_test(self, data, bits: int) -> bool | None:
        if self._membership is None:
            return None
        return self._membership(data, bits)

    def intersect(self, other: "EffClosedSet", name: str = "") -> "EffClosedSet":
        if other.space is not self.space:
            raise ValueError(f"closed sets live on different spaces: "
                             f"{self.name!r} vs {other.name!r}")
        def membership(data, bits):
            a = self.membership_test(data, bits)
            b = other.membership_test(data, bits)
            if a is False or b is False:
                return False
            if a is True and b is True:
                return True
            return None
        return EffClosedSet(self.space,
                            Enumerator.union([self.complement_enum, other.complement_enum]),
                            name=name, membership=membership)

    @staticmethod
    def whole(space, name: str = "whole space") -> "EffClosedSet":
        return EffClosedSet(space, Enumerator.fixed(()), name=name,
                            membership=lambda data, bits: True)

    @staticmethod
    def from_complement_items(space, items, name: str = "", membership=None) -> "EffClosedSet":
        return EffClosedSet(space, Enumerator.fixed(items), name=name,
                            membership=membership)


class RecCompactSet:
    """Recursively compact set: a total, monotone cover acceptor.

    The default acceptor runs the covering engine on the space's root
    pieces with the queried items plus extra_regions(stage) -- the open
    complement of whatever closed restriction carved this compact out
    of the full space.  cover_fn overrides the whole stage check (used
    for images of compacts under maps).  members is a tuple of exact
    membership hooks; a point certified by all of them lies in the set.
    """

    def __init__(self, space, *, extra_regions=None, cover_fn=None,
                 members: tuple = (), name: str = ""):
        self.space = space
        self.name = name
        self._extra = extra_regions
        self._cover_fn = cover_fn
        self.members = members
        self._queries: dict = {}

    def extra_regions(self, stage: int) -> tuple:
        return tuple(self._extra(stage)) if self._extra is not None else ()

    def covers_at_stage(self, regions, stage: int) -> bool:
        if self._cover_fn is not None:
            return self._cover_fn(regions, stage)
        return covers_within(self.space, tuple(regions) + self.extra_regions(stage), stage)

    def accepts(self, items, fuel: int) -> SemiDecision:
        """Semi-decide that the finite family of open items covers the set."""
        regions = []
        for it in items:
            r = self.space.normalize_item(it)
            if r != EMPTY:
                regions.append(r)
        regions = tuple(regions)
        key = _canonical_items_key(regions)
        q = self._queries.get(key)
        if q is None:
            def check(t, regions=regions):
                return () if self.covers_at_stage(regions, t) else None
            q = self._queries[key] = StagedQuery(check)
        return q.query(fuel)

    def contains_point_certainly(self, data, bits: int) -> bool:
        """True only when every membership hook certifies the point."""
        return all(m(data, bits) is True for m in self.members) if self.members else True

    def restrict(self, closed: EffClosedSet, name: str = "") -> "RecCompactSet":
        if closed.space is not self.space:
            raise ValueError(f"restriction lives on a different space: "
                             f"{closed.name!r} vs {self.name!r}")
        if self._cover_fn is not None:
            base = self._cover_fn
            def cover_fn(regions, stage):
                return base(tuple(regions) + closed.complement_regions(stage), stage)
            return RecCompactSet(self.space, cover_fn=cover_fn,
                                 members=self.members + (closed.membership_test,),
                                 name=name)
        def extra(stage):
            return self.extra_regions(stage) + closed.complement_regions(stage)
        return RecCompactSet(self.space, extra_regions=extra,
                             members=self.members + (closed.membership_test,),
                             name=name)

    @staticmethod
    def whole(space, name: str = "") -> "RecCompactSet":
        return RecCompactSet(space, name=name)


def semi_decide_cover(k: RecCompactSet, u: EffOpenSet, fuel: int) -> SemiDecision:
    """Semi-decide that the open set's enumerated balls cover the compact set.

    Stage t asks the acceptor about the full family emitted within t, at
    inner budget t; any accepted family is a finite subfamily witness.
    """
    if k.space is not u.space:
        raise ValueError(f"cover query across spaces: {k.name!r} vs {u.name!r}")
    q = k._queries.get(("open", id(u)))
    if q is None:
        def check(t):
            if k.covers_at_stage(u.regions(t), t):
                return u.items(t)
            return None
        q = k._queries[("open", id(u))] = StagedQuery(check)
        k._queries[("openref", id(u))] = u  # keep the open set alive with its query
    return q.query(fuel)


def semi_decide_empty(c: EffClosedSet, ambient: RecCompactSet, fuel: int) -> SemiDecision:
    """Semi-decide that the closed set meets the ambient compact set nowhere.

    Dovetails the cover attempt (complement covers ambient) with an
    exact witness scan: an ideal point certified to lie in both the
    closed set and the ambient refutes emptiness permanently.
    """
    if c.space is not ambient.space:
        raise ValueError(f"emptiness query across spaces: {c.name!r} vs {ambient.name!r}")
    q = c._empty_queries.get(id(ambient))
    if q is None:
        def check(t):
            bits = _stage_bits(t)
            for data in itertools.islice(c.space.sample_stream(t), min(t, 256)):
                if c.membership_test(data, bits) is True and \
                        ambient.contains_point_certainly(data, bits):
                    raise Refuted
            if ambient.covers_at_stage(c.complement_regions(t), t):
                return c.complement_items(t)
            return None
        q = c._empty_queries[id(ambient)] = StagedQuery(check)
        c._empty_queries[("ambientref", id(ambient))] = ambient
    return q.query(fuel)


def closed_to_compact(c: EffClosedSet, ambient: RecCompactSet,
                      name: str = "") -> RecCompactSet:
    """The compact set ambient ∩ c, as a cover acceptor.

    A family covers the intersection exactly when the family together
    with c's complement covers the ambient set.
    """
    return ambient.restrict(c, name=name or c.name)


def compact_to_closed(k: RecCompactSet, name: str = "") -> EffClosedSet:
    """The compact set as an effectively closed set.

    The complement enumeration emits every basic ball certified disjoint
    from k: the acceptor must accept the complement of the ball's
    closure (exact per-space regions when available, the metric
    exterior otherwise).  Candidate balls are swept by the pairing of
    ideal index with dyadic radius level, with inner budgets that grow
    as the candidate's code shrinks relative to the stage.
    """
    space = k.space
    ball_queries: dict[int, StagedQuery] = {}

    def ball_query(code: int) -> StagedQuery:
        q = ball_queries.get(code)
        if q is None:
            center, radius = coding.ball_decode(code)
            closure = space.ball_closure_complement(space.ideal_to_data(center), radius)
            targets = closure if closure is not None else (AntiBall(center, radius),)
            def check(s, targets=targets):
                return () if k.covers_at_stage(targets, s) else None
            q = ball_queries[code] = StagedQuery(check)
        return q

    def batch(t: int):
        out = []
        for code in range(t):
            inner = max(8, t >> code.bit_length())
            if ball_query(code).query(inner):
                out.append(code)
        return out

    return EffClosedSet(space, Enumerator(batch), name=name or (k.name and f"{k.name} as closed"))


def product_space(spaces: list, compacts: list):
    """Product of finitely many spaces with its product compact set.

    Distances are summed with weights 2^-i; the acceptor works on
    product boxes, truncating to finitely many coordinates through the
    weighted tail-diameter bound.  Component restrictions (extra
    complement regions and membership hooks) lift coordinatewise.
    """
    from .space import ProductSpace
    if len(spaces) != len(compacts):
        raise ValueError(f"got {len(spaces)} spaces but {len(compacts)} compacts")
    for s, kk in zip(spaces, compacts):
        if kk.space is not s:
            raise ValueError(f"compact {kk.name!r} not on its listed space")
        if kk._cover_fn is not None:
            raise ValueError(f"compact {kk.name!r} has a bespoke acceptor; "
                             f"only root-piece compacts can enter a product")
    prod = ProductSpace(components=spaces)

    def extra(stage):
        out = []
        for i, kk in enumerate(compacts):
            for r in kk.extra_regions(stage):
                out.append(PBox(((i, r),)))
        return tuple(out)

    members = tuple((lambda data, bits, i=i, m=m: m(prod.data_component(data, i), bits))
                    for i, kk in enumerate(compacts) for m in kk.members)
    k = RecCompactSet(prod, extra_regions=extra, members=members,
                      name=" x ".join(kk.name for kk in compacts if kk.name))
    return prod, k


def power_space(space, compact: RecCompactSet, name: str = ""):
    """Countable power of one space with its power compact set."""
    from .space import ProductSpace
    if compact.space is not space:
        raise ValueError("compact not on the given space")
    if compact._cover_fn is not None:
        raise ValueError("only root-piece compacts can enter a power")
    prod = ProductSpace(uniform=space)

    def extra(stage):
        out = []
        width = max(1, stage.bit_length())
        for i in range(width):
            for r in compact.extra_regions(stage):
                out.append(PBox(((i, r),)))
        return tuple(out)

    members = tuple()
    if compact.members:
        def member_all(data, bits, ms=compact.members):
            # certify finitely-supported coordinates; default coordinate too
            coords = set(data) | {max(data, default=-1) + 1}
            for i in coords:
                for m in ms:
                    if m(prod.data_component(data, i), bits) is not True:
                        return None
            return True
        members = (member_all,)
    k = RecCompactSet(prod, extra_regions=extra, members=members, name=name)
    return prod, k
