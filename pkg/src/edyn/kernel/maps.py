"""Computable maps between computable metric spaces.

A map is presented by preimage data: for every basic ball (or exact
region) of the target, a fuel-monotone enumeration of source items
whose union is the preimage.  The built-in systems all carry exact
region-rewiring hooks, so preimages of symbol boxes, intervals and arcs
are single exact regions and no fuel is consumed; the generic ball
route exists for maps presented only through ball enumerations.

Maps may also carry an exact forward hook image_region (a closed region
certified to contain the image of a given closed piece) and an exact
apply on ideal-point data.  Those power the fixed-point machinery: a
piece whose image region certifiably avoids the piece contains no fixed
point, so it can be emitted into the complement of the fixed-point set.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from .. import coding
from .fuel import Enumerator, SemiDecision, StagedQuery
from .regions import EMPTY, region_key
from .sets import EffClosedSet, EffOpenSet, RecCompactSet, _stage_bits


class ComputablePoint:
    """A point given by ideal approximations: approx(n) is an ideal index
    within 2^-n of the point."""

    def __init__(self, space, approx, name: str = ""):
        self.space = space
        self.approx = approx
        self.name = name

    @staticmethod
    def from_ideal(space, index: int, name: str = "") -> "ComputablePoint":
        return ComputablePoint(space, lambda n: index, name=name)

    def data(self, n: int):
        return self.space.ideal_to_data(self.approx(n))


class ComputableMap:
    """Computable map src -> dst presented by preimage data.

    preimage_region: exact hook region -> region | tuple of regions |
    EMPTY | None (None = shape not handled, fall back to balls).
    preimage_balls: (target ball index, fuel) -> iterable of source
    items, monotone in fuel.  At least one of the two must be given.
    apply_data: exact action on ideal-point data.  image_region: closed
    region containing the image of a closed piece, or None.
    """

    def __init__(self, src, dst, *, preimage_region=None, preimage_balls=None,
                 apply_data=None, image_region=None, domain: EffClosedSet | None = None,
                 name: str = ""):
        if preimage_region is None and preimage_balls is None:
            raise ValueError(f"map {name!r} needs preimage_region or preimage_balls")
        self.src = src
        self.dst = dst
        self._preimage_region = preimage_region
        self._preimage_balls = preimage_balls
        self._apply = apply_data
        self._image_region = image_region
        self.domain = domain
        self.name = name

    @property
    def has_apply(self) -> bool:
        return self._apply is not None

    def apply_data(self, data):
        if self._apply is None:
            raise ValueError(f"map {self.name!r} has no exact point action")
        return self._apply(data)

    def image_region(self, piece):
        """Closed region certified to contain the image of the closed piece."""
        return self._image_region(piece) if self._image_region is not None else None

    def preimage_regions(self, region, fuel: int) -> tuple:
        """Source regions whose union is (within fuel) the preimage of the region."""
        if self._preimage_region is not None:
            out = self._preimage_region(region)
            if out is not None:
                if out == EMPTY:
                    return ()
                if isinstance(out, tuple):
                    return tuple(r for r in out if r != EMPTY)
                return (out,)
        regs = []
        for b in self.dst.region_to_balls(region, fuel):
            for it in self.preimage_items_of_ball(b, fuel):
                r = self.src.normalize_item(it)
                if r != EMPTY:
                    regs.append(r)
        return tuple(sorted(set(regs), key=region_key))

    def preimage_items_of_ball(self, ball_index: int, fuel: int) -> tuple:
        if self._preimage_balls is not None:
            return tuple(self._preimage_balls(ball_index, fuel))
        return self.preimage_regions(self.dst.decode_ball(ball_index), fuel)

    def preimage_enum(self, ball_index: int, fuel: int) -> frozenset:
        """Ball-index view of the preimage of a target basic ball."""
        out = set()
        for it in self.preimage_items_of_ball(ball_index, fuel):
            if isinstance(it, int):
                out.add(it)
            else:
                out.update(self.src.region_to_balls(it, fuel))
        return frozenset(out)

    def preimage_open(self, u: EffOpenSet, name: str = "") -> EffOpenSet:
        """The preimage of an effectively open set."""
        if u.space is not self.dst:
            raise ValueError(f"open set {u.name!r} not on the target of {self.name!r}")
        def batch(t):
            out = []
            for region in u.regions(t):
                out.extend(self.preimage_regions(region, t))
            return out
        return EffOpenSet(self.src, Enumerator(batch),
                          name=name or f"{self.name}^-1({u.name})")


def identity_map(space, name: str = "id") -> ComputableMap:
    return ComputableMap(space, space,
                         preimage_region=lambda r: r,
                         apply_data=lambda d: d,
                         image_region=lambda p: p,
                         name=name)


def map_compose(f: ComputableMap, g: ComputableMap, name: str = "") -> ComputableMap:
    """The composite x -> g(f(x)); f's target must be g's source."""
    if f.dst is not g.src:
        raise ValueError(f"cannot compose {f.name!r} into {g.name!r}: space mismatch")
    name = name or f"{g.name}∘{f.name}"

    def preimage_region(region):
        mids = g._preimage_region(region) if g._preimage_region is not None else None
        if mids is None:
            return None
        if mids == EMPTY:
            return EMPTY
        if not isinstance(mids, tuple):
            mids = (mids,)
        out = []
        for mid in mids:
            if mid == EMPTY:
                continue
            pre = f._preimage_region(mid) if f._preimage_region is not None else None
            if pre is None:
                return None
            if pre == EMPTY:
                continue
            out.extend(pre if isinstance(pre, tuple) else (pre,))
        return tuple(r for r in out if r != EMPTY)

    has_native = f._preimage_region is not None and g._preimage_region is not None

    def preimage_balls(ball_index, fuel):
        items = []
        for mid in g.preimage_items_of_ball(ball_index, fuel):
            mid_region = g.src.normalize_item(mid)
            if mid_region != EMPTY:
                items.extend(f.preimage_regions(mid_region, fuel))
        return items

    apply = None
    if f._apply is not None and g._apply is not None:
        apply = lambda d: g._apply(f._apply(d))
    image = None
    if f._image_region is not None and g._image_region is not None:
        def image(piece):
            mid = f.image_region(piece)
            return g.image_region(mid) if mid is not None else None
    return ComputableMap(f.src, g.dst,
                         preimage_region=preimage_region if has_native else None,
                         preimage_balls=preimage_balls,
                         apply_data=apply, image_region=image, name=name)


def product_map(maps: list[ComputableMap], src, dst, name: str = "") -> ComputableMap:
    """Coordinatewise map on finite products, acting on product boxes."""
    from .regions import PBox
    for i, m in enumerate(maps):
        if m.src is not src.component(i) or m.dst is not dst.component(i):
            raise ValueError(f"component map {i} does not match the product spaces")

    def preimage_region(region):
        if not isinstance(region, PBox):
            return None
        entries = []
        for comp, reg in region.entries:
            pre = maps[comp]._preimage_region(reg) if maps[comp]._preimage_region else None
            if pre is None:
                return None
            if pre == EMPTY:
                return EMPTY
            if isinstance(pre, tuple):
                if len(pre) != 1:
                    # distribute a multi-part component preimage over products
                    rest = PBox(tuple((c, r) for c, r in region.entries if c != comp))
                    tails = preimage_region(rest)
                    if tails is None:
                        return None
                    if tails == EMPTY:
                        return EMPTY
                    tails = tails if isinstance(tails, tuple) else (tails,)
                    out = []
                    for part in pre:
                        if part == EMPTY:
                            continue
                        for tail in tails:
                            t_entries = tail.entries if isinstance(tail, PBox) else ()
                            out.append(PBox(tuple(sorted(t_entries + ((comp, part),)))))
                    return tuple(out)
                pre = pre[0]
            entries.append((comp, pre))
        return PBox(tuple(sorted(entries)))

    def image_region(piece):
        if not isinstance(piece, PBox):
            return None
        entries = []
        for comp, part in piece.entries:
            img = maps[comp].image_region(part)
            if img is None:
                return None
            entries.append((comp, img))
        return PBox(tuple(sorted(entries)))

    apply = None
    if all(m._apply is not None for m in maps):
        if src.finite:
            apply = lambda d: tuple(maps[i]._apply(d[i]) for i in range(src.width))
    return ComputableMap(src, dst, preimage_region=preimage_region,
                         apply_data=apply, image_region=image_region, name=name)


def image_compact(f: ComputableMap, k: RecCompactSet, name: str = "") -> RecCompactSet:
    """The image f(k) as a recursively compact subset of the target space.

    A family covers the image exactly when the preimages of its members
    cover k, so the acceptor pulls every queried region back through f
    at the current stage and delegates.
    """
    if k.space is not f.src:
        raise ValueError(f"compact {k.name!r} not on the source of {f.name!r}")

    def cover_fn(regions, stage):
        pre = []
        for region in regions:
            pre.extend(f.preimage_regions(region, stage))
        return k.covers_at_stage(tuple(pre), stage)

    members = ()
    if f._apply is not None and k.members:
        # no inverse available: image membership is not certified generically
        members = ()
    return RecCompactSet(f.dst, cover_fn=cover_fn, members=members,
                         name=name or f"{f.name}({k.name})")


def pushforward_open(f: ComputableMap, k: RecCompactSet, b, name: str = "") -> EffOpenSet:
    """The open set U_B with f(B ∩ K) = f(K) ∩ U_B, for an open item b.

    Computed as the complement-style enumeration of Y minus f(K minus B):
    K minus B is recursively compact (closed_to_compact of the complement
    of b), its image is recursively compact, and the open complement of
    that image is the answer.
    """
    from .sets import closed_to_compact, compact_to_closed
    region = f.src.normalize_item(b)
    if region == EMPTY:
        k_minus = k
    else:
        c = EffClosedSet.from_complement_items(f.src, (b,), name="complement of b")
        k_minus = closed_to_compact(c, k, name=f"{k.name} minus b")
    img = image_compact(f, k_minus)
    return compact_to_closed(img).complement_open(
        name=name or f"pushforward of {f.name} off b")


def fixed_point_set(f: ComputableMap, k: RecCompactSet, name: str = "") -> EffClosedSet:
    """The effectively closed set of fixed points of f inside k.

    The complement enumeration walks the piece tree breadth-first with
    the stage as its visit budget.  A piece whose forward image region
    certifiably avoids the piece carries no fixed point: clopen pieces
    are emitted directly, other pieces are rounded to a basic ball
    around the piece's bounding center (twice the bounding radius, so
    the emitted open ball contains the piece) and the certificate is
    re-run on that ball's closed hull.  The complement of k itself is
    unioned in.  An exact apply hook doubles as a membership test, so
    emptiness queries can be refuted by explicit fixed witnesses.
    """
    if f.src is not f.dst:
        raise ValueError(f"fixed points need a self-map, got {f.name!r}")
    if k.space is not f.src:
        raise ValueError(f"compact {k.name!r} not on the space of {f.name!r}")
    space = f.src
    clopen = getattr(space, "pieces_clopen", False)

    def batch(t):
        out = []
        bits = _stage_bits(t)
        budget = t
        work = deque(space.root_pieces())
        while work and budget > 0:
            budget -= 1
            piece = work.popleft()
            if clopen:
                img = f.image_region(piece)
                if img is not None and space.piece_avoids(piece, img, bits):
                    out.append(piece)
                    continue
            else:
                center, rho = space.piece_bound(piece)
                hull = space.closed_ball_piece(space.ideal_to_data(center), 2 * rho) \
                    if rho > 0 else None
                if hull is not None:
                    img = f.image_region(hull)
                    if img is not None and space.piece_avoids(hull, img, bits):
                        out.append(coding.ball_code(center, 2 * rho))
                        continue
            hint = space.default_hint(piece)
            children = space.split_piece(piece, hint)
            if children != (piece,):
                work.extend(children)
        return out

    enum = Enumerator.union([Enumerator(batch), Enumerator(lambda t: k.extra_regions(t))])

    membership = None
    if f._apply is not None:
        def membership(data, bits):
            fixed = space.canonical_data(f._apply(data)) == space.canonical_data(data)
            if not fixed:
                return False
            return True if k.contains_point_certainly(data, bits) else None

    return EffClosedSet(space, enum, name=name or f"fixed points of {f.name}",
                        membership=membership)
