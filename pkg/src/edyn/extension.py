"""Group actions on rec. compact carriers and their symbolic codings.

An action of a finitely generated group is carried by an EdsSpec: one
self-map of the carrier per generator letter and per formal inverse.
Coding the action through a refining chain of effective covers yields a
tower of label subshifts over the free group on the generators: level n
records, for every group element, a nested chain of cover labels whose
pieces shrink below 2^-n.  The tower evaluates back to the carrier one
ball lookup deep, and the expansive special case collapses the tower to
a single coding subshift.  Products, inverse limits and equivariant
factor maps round out the toolkit.
"""

import itertools
from fractions import Fraction

from . import cantor, coding, covers
from .groups import (GenAlphabet, PatternCoding, SubshiftSpec, WordProblemOracle,
                     builtin_group, pullback_fullshift, reduce_word)
from .kernel.fuel import Enumerator
from .kernel.maps import (ComputableMap, fixed_point_set, identity_map,
                          image_compact, map_compose, product_map,
                          pushforward_open)
from .kernel.regions import (EMPTY, Arc, Box, PBox, box_intersection, box_make,
                             mod1)
from .kernel.sets import (EffClosedSet, EffOpenSet, RecCompactSet,
                          product_space)
from .kernel.space import CantorSpace, CircleSpace


class EdsSpec:
    """A finitely generated group action on a recursively compact carrier.

    maps assigns a self-map of the carrier's space to every generator
    letter and every formal inverse letter.  That the inverse pairs
    actually invert each other is a caller contract, spot-checked on
    dense points by check_inverse_pairs rather than verified globally.
    """

    def __init__(self, carrier: RecCompactSet, generators: GenAlphabet,
                 maps: dict, oracle: WordProblemOracle, name: str = ""):
        for letter in generators.symbols:
            if letter not in maps:
                raise ValueError(f"no map given for generator letter {letter!r}")
        for letter, m in maps.items():
            if m.src is not carrier.space or m.dst is not carrier.space:
                raise ValueError(
                    f"map for letter {letter!r} is not a self-map of the carrier space")
        self.carrier = carrier
        self.generators = generators
        self.maps = dict(maps)
        self.oracle = oracle
        self.name = name

    @property
    def space(self):
        return self.carrier.space

    def word_map(self, word) -> ComputableMap:
        """The map of a generator word, leftmost letter applied last."""
        word = tuple(word)
        if not word:
            return identity_map(self.space)
        out = self.maps[word[-1]]
        for letter in reversed(word[:-1]):
            out = map_compose(out, self.maps[letter])
        return out

    def check_inverse_pairs(self, samples: int = 8, bits: int = 16):
        """Spot the inverse-pair law on the first ideal points.

        Pairs without exact point actions are skipped; for the rest the
        round trip must return to within 2^-bits of the sample.
        """
        space = self.space
        tol = Fraction(1, 1 << bits)
        for g, v in self.generators.pairs:
            fwd, bwd = self.maps[g], self.maps[v]
            if not (fwd.has_apply and bwd.has_apply):
                continue
            for i in range(samples):
                data = space.canonical_data(space.ideal_to_data(i))
                for first, second in ((fwd, bwd), (bwd, fwd)):
                    out = space.canonical_data(
                        second.apply_data(first.apply_data(data)))
                    if out != data and space.distance_data(out, data, bits + 2) > tol:
                        raise ValueError(
                            f"maps for {g!r} and {v!r} do not invert each other "
                            f"at sample point {i}")

    def __repr__(self):
        return (f"EdsSpec({self.name or 'unnamed'}, "
                f"letters={list(self.maps)})")


# ---------------------------------------------------------------------------
# named systems

def _pos_to_coord(n: int) -> int:
    # positions 0, 1, -1, 2, -2, ... at coordinates 0, 1, 2, 3, 4, ...
    return 0 if n == 0 else (2 * n - 1 if n > 0 else -2 * n)


def _coord_to_pos(i: int) -> int:
    if i == 0:
        return 0
    return (i + 1) // 2 if i % 2 else -(i // 2)


def _two_sided_shift(space: CantorSpace, step: int, name: str) -> ComputableMap:
    """Shift by step on bi-infinite words stored at interleaved coordinates."""

    def move(entries, delta):
        return box_make([(_pos_to_coord(_coord_to_pos(c) + delta), set(s))
                         for c, s in entries], space.sizes)

    def pre(region):
        return move(region.entries, step) if isinstance(region, Box) else None

    def image(piece):
        return move(piece.entries, -step) if isinstance(piece, Box) else None

    def apply(data):
        word, tail = data
        def at(pos):
            c = _pos_to_coord(pos)
            return word[c] if c < len(word) else tail
        out = tuple(at(_coord_to_pos(i) + step)
                    for i in range(len(word) + 2 * abs(step) + 2))
        return space.canonical_data((out, tail))

    return ComputableMap(space, space, preimage_region=pre, apply_data=apply,
                         image_region=image, name=name)


def _golden_two_sided_carrier(space: CantorSpace) -> RecCompactSet:
    def batch(t):
        out = []
        for k in range(t):
            n = _coord_to_pos(k)
            out.append(box_make([(_pos_to_coord(n), {1}),
                                 (_pos_to_coord(n + 1), {1})], space.sizes))
        return out

    def member(data, bits):
        word, tail = data
        if tail == 1:
            return False
        span = len(word) // 2 + 2
        def at(pos):
            c = _pos_to_coord(pos)
            return word[c] if c < len(word) else tail
        return all(not (at(n) and at(n + 1)) for n in range(-span, span))

    closed = EffClosedSet(space, Enumerator(batch, label="adjacent 11 blocks"),
                          name="golden mean", membership=member)
    return RecCompactSet.whole(space).restrict(closed, name="golden mean")


def _rotation_map(space: CircleSpace, angle: Fraction) -> ComputableMap:
    angle = mod1(angle)

    def shifted(arc, delta):
        if arc.full:
            return arc
        return Arc(mod1(arc.start + delta), arc.length,
                   arc.lo_strict, arc.hi_strict)

    return ComputableMap(space, space,
                         preimage_region=lambda r: shifted(r, -angle)
                         if isinstance(r, Arc) else None,
                         apply_data=lambda x: mod1(x + angle),
                         image_region=lambda p: shifted(p, angle)
                         if isinstance(p, Arc) else None,
                         name=f"rotation {angle}")


def eds_from_builtin(name: str, params=None) -> EdsSpec:
    """Named systems with the integers acting: letter a steps forward.

    odometer is binary add-one; full_shift and golden_mean shift
    bi-infinite binary words (interleaved coordinates, position 0 at
    coordinate 0), the latter with adjacent 1s forbidden; rotation needs
    params = the rational angle in turns.
    """
    gens, oracle = builtin_group("Z")
    if name == "odometer":
        closed, (fwd, bwd) = cantor.builtin_system("odometer")
        carrier = RecCompactSet.whole(closed.space, name="binary sequences")
        return EdsSpec(carrier, gens, {"a": fwd, "A": bwd}, oracle,
                       name="odometer")
    if name == "full_shift":
        space = CantorSpace.alphabet(2)
        carrier = RecCompactSet.whole(space, name="binary configurations")
        maps = {"a": _two_sided_shift(space, 1, "shift"),
                "A": _two_sided_shift(space, -1, "shift inverse")}
        return EdsSpec(carrier, gens, maps, oracle, name="full shift")
    if name == "golden_mean":
        space = CantorSpace.alphabet(2)
        carrier = _golden_two_sided_carrier(space)
        maps = {"a": _two_sided_shift(space, 1, "shift"),
                "A": _two_sided_shift(space, -1, "shift inverse")}
        return EdsSpec(carrier, gens, maps, oracle, name="golden mean shift")
    if name == "rotation":
        if params is None:
            raise ValueError("rotation needs params = angle in turns")
        angle = Fraction(params)
        space = CircleSpace()
        carrier = RecCompactSet.whole(space, name="circle")
        maps = {"a": _rotation_map(space, angle),
                "A": _rotation_map(space, -angle)}
        return EdsSpec(carrier, gens, maps, oracle, name=f"rotation by {angle}")
    raise ValueError(f"unknown builtin system {name!r}")


# ---------------------------------------------------------------------------
# products and inverse limits

def product_action(systems) -> EdsSpec:
    """The coordinate-wise action on a finite product of carriers."""
    systems = list(systems)
    if not systems:
        raise ValueError("a product needs at least one system")
    gens = systems[0].generators
    oracle = systems[0].oracle
    for e in systems[1:]:
        if e.generators != gens:
            raise ValueError("product components must share one generating alphabet")
    prod, carrier = product_space([e.space for e in systems],
                                  [e.carrier for e in systems])
    maps = {letter: product_map([e.maps[letter] for e in systems], prod, prod,
                                name=f"product {letter}")
            for letter in gens.symbols}
    name = " x ".join(e.name for e in systems if e.name)
    return EdsSpec(carrier, gens, maps, oracle, name=name)


def inverse_limit(systems, projections, name: str = "") -> EffClosedSet:
    """The inverse limit of a finite chain, inside the product of its levels.

    systems lists the level carriers K_0 .. K_N and projections[i] maps
    the space of K_{i+1} onto that of K_i.  The limit is the fixed-point
    set of the consistency self-map
    (x_0, .., x_N) -> (p_0(x_1), .., p_{N-1}(x_N), x_N) on the product
    carrier, so it only needs image regions and exact point actions of
    the projections.
    """
    systems = list(systems)
    projections = list(projections)
    if len(projections) != len(systems) - 1:
        raise ValueError(f"a chain of {len(systems)} levels needs "
                         f"{len(systems) - 1} projections, got {len(projections)}")
    for i, p in enumerate(projections):
        if p.src is not systems[i + 1].space or p.dst is not systems[i].space:
            raise ValueError(f"projection {i} does not map level {i + 1} "
                             f"onto level {i}")
    prod, carrier = product_space([k.space for k in systems], systems)
    last = len(systems) - 1

    def image(piece):
        if not isinstance(piece, PBox):
            return None
        entries = []
        for i, region in piece.entries:
            if i >= 1:
                img = projections[i - 1].image_region(region)
                if img is not None and img != EMPTY:
                    entries.append((i - 1, img))
            if i == last:
                entries.append((last, region))
        return PBox(tuple(sorted(entries, key=lambda e: e[0])))

    apply = None
    if all(p.has_apply for p in projections):
        def apply(d):
            out = [projections[i].apply_data(d[i + 1]) for i in range(last)]
            out.append(d[last])
            return tuple(out)

    consistency = ComputableMap(
        prod, prod,
        preimage_region=lambda region: None,  # the engine reads image and apply only
        apply_data=apply, image_region=image, name="chain consistency")
    return fixed_point_set(consistency, carrier, name=name or "inverse limit")


# ---------------------------------------------------------------------------
# the extension tower

class ExtensionTower:
    """A stack of label subshifts coding one action at increasing precision.

    Tower level n is a subshift whose symbols are label tuples
    (e_0, .., e_n) over the chain covers; admissible_symbols(n) lists
    the tuples that follow the recorded parent tables, so the pieces
    they name are nested and the last label determines the rest.
    projections[n] drops the last coordinate, sending the admissible
    level-(n+1) symbols onto the level-n ones.
    """

    def __init__(self, system: EdsSpec, levels, cover_chain, projections,
                 admissible, radius: int, zero_dim: bool):
        self.system = system
        self.levels = tuple(levels)
        self.cover_chain = tuple(cover_chain)
        self.projections = tuple(projections)
        self._admissible = tuple(admissible)
        self.radius = radius
        self.zero_dim = zero_dim

    def admissible_symbols(self, n: int) -> tuple:
        return self._admissible[n]

    def __repr__(self):
        return (f"ExtensionTower(levels={len(self.levels)}, "
                f"radius={self.radius}, system={self.system.name!r})")


def build_extension(e: EdsSpec, levels: int, radius: int, fuel: int) -> ExtensionTower:
    """Code the action through a refining cover chain, one subshift per level.

    Tower level n uses chain cover n+1, whose piece diameters are below
    2^-n, so evaluation at precision n is a single lookup.  Level n's
    forbidden enumerator interleaves, per stage: the label tuples that
    break the recorded nesting, the lifted cover-forbidden tables of
    every level up to n at the given pattern radius, and the
    word-problem consistency mismatches.  Raises NeedsMoreFuel when a
    chain cover cannot be certified within fuel.
    """
    if levels < 0:
        raise ValueError(f"tower needs a nonnegative level count, got {levels}")
    if radius < 0:
        raise ValueError(f"pattern radius must be nonnegative, got {radius}")
    zero_dim = isinstance(e.space, CantorSpace)
    chain = [covers.refine_cover_sequence(e.carrier, n + 1, zero_dim=zero_dim,
                                          fuel=fuel)
             for n in range(levels + 1)]
    pos_letters = e.generators.generators
    pos_maps = {s: e.maps[s] for s in pos_letters}

    alphabets = [tuple(range(len(c.pieces))) for c in chain]
    admissible = []
    for n in range(levels + 1):
        tuples = []
        for j in alphabets[n]:
            tup = [j]
            for k in range(n, 0, -1):
                tup.append(chain[k].parents[tup[-1]])
            tuples.append(tuple(reversed(tup)))
        admissible.append(tuple(sorted(tuples)))

    tables = [covers.subshift_cover_forbidden(pos_maps, chain[n], radius,
                                              letters=pos_letters)
              for n in range(levels + 1)]

    def lift_pattern(pattern, k, n):
        # constrain coordinate k of the admissible level-n tuples
        choices = []
        for word, sym in pattern.entries:
            opts = tuple(b for b in admissible[n] if b[k] == sym)
            if not opts:
                return ()
            choices.append((word, opts))
        return tuple(PatternCoding(tuple((word, b) for (word, _), b
                                         in zip(choices, combo)))
                     for combo in itertools.product(*[o for _, o in choices]))

    def level_forbidden(n):
        full = itertools.product(*alphabets[:n + 1])
        ok = set(admissible[n])
        nesting = tuple(PatternCoding((((), b),)) for b in full if b not in ok)
        pull = pullback_fullshift(e.generators, e.oracle, admissible[n])

        def batch(t, n=n, nesting=nesting, pull=pull):
            out = list(nesting)
            out.extend(pull.emit(t))
            for k in range(n + 1):
                for p in tables[k].emit(t):
                    out.extend(lift_pattern(p, k, n))
            return out

        return Enumerator(batch, label=f"tower level {n} forbidden")

    specs = []
    for n in range(levels + 1):
        specs.append(SubshiftSpec(tuple(itertools.product(*alphabets[:n + 1])),
                                  e.generators, e.oracle, level_forbidden(n),
                                  kind="ecp", tags=(f"tower level {n}",)))
    projections = [{b: b[:-1] for b in admissible[n + 1]}
                   for n in range(levels)]
    return ExtensionTower(e, specs, chain, projections, admissible, radius,
                          zero_dim)


def factor_eval(tower: ExtensionTower, z: dict, n: int) -> int:
    """Evaluate a coded prefix back to a carrier ball of radius <= 2^-n.

    z maps reduced generator words to admissible top-level label tuples;
    only the root word's label is consulted.  The returned basic ball
    index names an open ball containing the level-n piece of that label:
    clopen chain pieces are their own balls, metric chain pieces get a
    3/2 radius margin, and both stay within 2^-n.
    """
    if not 0 <= n < len(tower.levels):
        raise ValueError(f"precision {n} outside the tower's "
                         f"{len(tower.levels)} levels")
    if () not in z:
        raise ValueError("the prefix does not label the root word")
    top = set(tower.admissible_symbols(len(tower.levels) - 1))
    for word, label in z.items():
        if label not in top:
            raise ValueError(f"prefix labels word {word!r} with the "
                             f"inadmissible tuple {label}")
    piece = tower.cover_chain[n].pieces[z[()][n]]
    data, radius = piece.balls[0]
    if not tower.zero_dim:
        radius = radius * 3 / 2
    space = tower.system.space
    return coding.ball_code(space.data_to_ideal(data), radius)


def translate_prefix(z: dict, letter: str, alphabet: GenAlphabet) -> dict:
    """The coded prefix of a point's letter-image: the new label at w is
    the old label at w followed by the letter."""
    inv = alphabet.inverse(letter)
    out = {}
    for word, label in z.items():
        out[reduce_word(alphabet, tuple(word) + (inv,))] = label
    return out


# ---------------------------------------------------------------------------
# expansive actions and factors

def _certified_partition(space, cover) -> bool:
    """Whether the closed pieces are certifiably pairwise disjoint."""
    hulls = []
    for piece in cover.pieces:
        hs = []
        for data, radius in piece.balls:
            h = space.closed_ball_piece(data, radius)
            if h is not None:
                hs.append(h)
        hulls.append(hs)
    for i in range(len(hulls)):
        for j in range(i + 1, len(hulls)):
            if not any(isinstance(a, Box) and isinstance(b, Box) and
                       box_intersection(a, b, space.sizes) == EMPTY
                       for a in hulls[i] for b in hulls[j]):
                return False
    return bool(hulls)


def expansive_conjugacy(e: EdsSpec, generating_cover, fuel: int) -> SubshiftSpec:
    """Code the action through one cover, dovetailing over pattern radii.

    The caller promises the cover generates (iterated joins refine); the
    forbidden enumerator interleaves the cover-forbidden tables of
    growing radii with the word-problem consistency mismatches, so every
    certifiably absent pattern of every radius is eventually emitted.
    When the closed pieces are certifiably pairwise disjoint on a Cantor
    carrier the coding is injective and the spec is tagged "conjugacy",
    otherwise "factor".
    """
    if generating_cover.carrier is not e.carrier:
        raise ValueError("the cover does not cover this system's carrier")
    pos_letters = e.generators.generators
    pos_maps = {s: e.maps[s] for s in pos_letters}
    alphabet = tuple(range(len(generating_cover.pieces)))
    pull = pullback_fullshift(e.generators, e.oracle, alphabet)
    tables = {}

    def table(r):
        if r not in tables:
            tables[r] = covers.subshift_cover_forbidden(
                pos_maps, generating_cover, r, letters=pos_letters)
        return tables[r]

    def batch(t):
        out = list(pull.emit(t))
        # pattern counts blow up exponentially in the radius, so the
        # dovetail admits one more radius per eight doublings of fuel
        for r in range(t.bit_length() // 8 + 1):
            out.extend(table(r).emit(t))
        return out

    tag = "conjugacy" if (isinstance(e.space, CantorSpace) and
                          _certified_partition(e.space, generating_cover)) \
        else "factor"
    enum = Enumerator(batch, label="cover coding forbidden patterns")
    return SubshiftSpec(alphabet, e.generators, e.oracle, enum,
                        kind="ecp", tags=(tag,))


def factor_through(f: ComputableMap, e: EdsSpec, name: str = "") -> EdsSpec:
    """Push the action through an equivariant map onto its image.

    Equivariance of f is a caller contract (spot-check it on dense
    points).  The image carrier accepts covers through preimages; each
    generator map on the image is presented by ball preimages, sound
    because equivariance turns the preimage of a ball B inside the image
    into f(s^-1(f^-1(B))) relative to the source carrier.
    """
    if f.src is not e.space:
        raise ValueError(f"map {f.name!r} is not defined on the carrier space")
    image = image_compact(f, e.carrier,
                          name=name or (e.name and f"image of {e.name}"))
    new_maps = {}
    for letter in e.generators.symbols:
        comp = map_compose(e.maps[letter], f)
        pushed = {}

        def pre_balls(ball_index, fuel, comp=comp, pushed=pushed):
            out = []
            for item in comp.preimage_items_of_ball(ball_index, fuel):
                key = (ball_index, item if isinstance(item, int)
                       else repr(item))
                u = pushed.get(key)
                if u is None:
                    u = pushed[key] = pushforward_open(f, e.carrier, item)
                out.extend(u.regions(fuel))
            return tuple(out)

        new_maps[letter] = ComputableMap(f.dst, f.dst,
                                         preimage_balls=pre_balls,
                                         name=f"{letter} on the image")
    return EdsSpec(image, e.generators, new_maps, e.oracle,
                   name=name or (e.name and f"factor of {e.name}"))
