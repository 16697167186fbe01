"""Effective covers: refinement chains, joins, and forbidden-pattern tables."""

import itertools
from fractions import Fraction

import pytest

import oracles
from edyn import covers
from edyn.kernel.fuel import Enumerator, NeedsMoreFuel
from edyn.kernel.maps import ComputableMap, identity_map
from edyn.kernel.regions import Arc, Box, box_make, mod1
from edyn.kernel.sets import EffClosedSet, RecCompactSet, semi_decide_empty
from edyn.kernel.space import CantorSpace, CircleSpace, IntervalSpace

THIRD = Fraction(1, 3)
THIRDS_BALLS = ((Fraction(1, 6), Fraction(1, 6)),
                (Fraction(1, 2), Fraction(1, 6)),
                (Fraction(5, 6), Fraction(1, 6)))
THIRDS_ARCS = ((Fraction(0), THIRD), (THIRD, THIRD), (2 * THIRD, THIRD))


def thirds_cover(carrier, fuel=64):
    return covers.cover_from_balls(carrier, THIRDS_BALLS, fuel)


def rotation_map(space, angle):
    def pre(region):
        if isinstance(region, Arc):
            if region.full:
                return region
            return Arc(mod1(region.start - angle), region.length,
                       region.lo_strict, region.hi_strict)
        return None
    return ComputableMap(space, space, preimage_region=pre,
                         apply_data=lambda x: mod1(x + angle),
                         name=f"rotation {angle}")


def _odo_prev(word):
    # subtract one mod 2^len, least significant bit first
    out = []
    for i, b in enumerate(word):
        if b == 0:
            out.append(1)
        else:
            return tuple(out) + (0,) + tuple(word[i + 1:])
    return tuple(out)


def _box_words(box):
    depth = max((c for c, _ in box.entries), default=-1) + 1
    words = [()]
    for j in range(depth):
        allowed = box.allowed(j)
        syms = sorted(allowed) if allowed is not None else (0, 1)
        words = [w + (s,) for w in words for s in syms]
    return words


def odometer_map(space):
    def pre(region):
        if not isinstance(region, Box):
            return None
        return tuple(space.cylinder(_odo_prev(w)) for w in _box_words(region))
    return ComputableMap(space, space, preimage_region=pre,
                         apply_data=lambda d: oracles.odometer_point(*d),
                         name="odometer")


def golden_carrier(space):
    forbidden = Enumerator(
        lambda t: [box_make(((j, {1}), (j + 1, {1})), space.sizes)
                   for j in range(t)],
        label="11 blocks")
    closed = EffClosedSet(space, forbidden, name="no 11")
    return RecCompactSet.whole(space).restrict(closed, name="golden mean")


def pattern_symbols(coding):
    return tuple(s for _, s in coding.entries)


def emitted_tables(enum, fuel):
    return sorted(pattern_symbols(p) for p in enum.emit(fuel))


# ------------------------------------------------------------ refinement

def test_cylinder_chain_counts_and_parents():
    space = CantorSpace.alphabet(2)
    whole = RecCompactSet.whole(space)
    c0 = covers.refine_cover_sequence(whole, 0, zero_dim=True, fuel=64)
    c1 = covers.refine_cover_sequence(whole, 1, zero_dim=True, fuel=64)
    c2 = covers.refine_cover_sequence(whole, 2, zero_dim=True, fuel=64)
    assert [len(c.pieces) for c in (c0, c1, c2)] == [1, 2, 4]
    assert c0.parents is None
    assert c1.parents == (0, 0)
    assert c2.parents == (0, 0, 1, 1)
    assert [p.balls[0][0][0] for p in c2.pieces] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert all(c.certificate for c in (c0, c1, c2))


def test_cylinder_chain_is_memoized():
    space = CantorSpace.alphabet(2)
    whole = RecCompactSet.whole(space)
    first = covers.refine_cover_sequence(whole, 2, zero_dim=True, fuel=64)
    again = covers.refine_cover_sequence(whole, 2, zero_dim=True, fuel=64)
    assert first is again


def test_cylinder_chain_drops_forbidden_traces():
    space = CantorSpace.alphabet(2)
    carrier = golden_carrier(space)
    c2 = covers.refine_cover_sequence(carrier, 2, zero_dim=True, fuel=128)
    words = [p.balls[0][0][0] for p in c2.pieces]
    assert words == [(0, 0), (0, 1), (1, 0)]
    c3 = covers.refine_cover_sequence(carrier, 3, zero_dim=True, fuel=128)
    words = [p.balls[0][0][0] for p in c3.pieces]
    assert words == sorted(w for w in oracles.all_words(2, 3)
                           if oracles.eleven_free(w))
    # children extend kept parents only
    for i, j in enumerate(c3.parents):
        assert c3.pieces[i].balls[0][0][0][:2] == c2.pieces[j].balls[0][0][0]


def test_cylinder_chain_needs_fuel_then_recovers():
    space = CantorSpace.alphabet(2)
    whole = RecCompactSet.whole(space)
    with pytest.raises(NeedsMoreFuel):
        covers.refine_cover_sequence(whole, 1, zero_dim=True, fuel=2)
    c1 = covers.refine_cover_sequence(whole, 1, zero_dim=True, fuel=16)
    assert len(c1.pieces) == 2


def test_zero_dim_needs_cantor_space():
    whole = RecCompactSet.whole(IntervalSpace())
    with pytest.raises(ValueError):
        covers.refine_cover_sequence(whole, 0, zero_dim=True, fuel=64)


def test_metric_chain_interval():
    whole = RecCompactSet.whole(IntervalSpace())
    m0 = covers.refine_cover_sequence(whole, 0, fuel=256)
    m1 = covers.refine_cover_sequence(whole, 1, fuel=256)
    assert [p.balls[0][0] for p in m0.pieces] == [0, 1, Fraction(1, 2)]
    assert [p.balls[0][0] for p in m1.pieces] == [0, 1, Fraction(1, 3), Fraction(2, 3)]
    assert m1.parents == (0, 1, 2, 2)
    assert m0.pieces[0].balls[0][1] == Fraction(1, 2)
    assert m1.pieces[0].balls[0][1] == Fraction(1, 4)


def test_metric_chain_circle():
    whole = RecCompactSet.whole(CircleSpace())
    m0 = covers.refine_cover_sequence(whole, 0, fuel=256)
    m1 = covers.refine_cover_sequence(whole, 1, fuel=256)
    assert len(m0.pieces) == 2
    assert [p.balls[0][0] for p in m1.pieces] == [0, Fraction(1, 3), Fraction(2, 3)]
    assert m1.parents == (0, 1, 1)


def test_metric_parents_contain_children():
    space = IntervalSpace()
    whole = RecCompactSet.whole(space)
    prev = covers.refine_cover_sequence(whole, 1, fuel=256)
    cur = covers.refine_cover_sequence(whole, 2, fuel=256)
    for i, j in enumerate(cur.parents):
        (c, r), = cur.pieces[i].balls
        (pc, pr), = prev.pieces[j].balls
        assert space.distance_data(c, pc, 20) + r < pr


def test_metric_chain_needs_fuel():
    whole = RecCompactSet.whole(IntervalSpace())
    with pytest.raises(NeedsMoreFuel):
        covers.refine_cover_sequence(whole, 0, fuel=1)


def test_negative_level_rejected():
    whole = RecCompactSet.whole(IntervalSpace())
    with pytest.raises(ValueError):
        covers.refine_cover_sequence(whole, -1, fuel=64)


# ------------------------------------------------------- cover_from_balls

def test_closed_thirds_cover_certified_exactly():
    # the open thirds never cover (they miss 0, 1/3, 2/3), so the
    # certificate must come from the exact closed-union route
    whole = RecCompactSet.whole(CircleSpace())
    cov = thirds_cover(whole)
    assert cov.certificate
    assert cov.certificate.at_fuel == 1
    assert len(cov.pieces) == 3


def test_closed_thirds_on_interval():
    whole = RecCompactSet.whole(IntervalSpace())
    cov = covers.cover_from_balls(whole, THIRDS_BALLS, fuel=64)
    assert cov.certificate
    assert cov.certificate.at_fuel == 1


def test_missing_piece_stays_uncertified():
    whole = RecCompactSet.whole(CircleSpace())
    cov = covers.cover_from_balls(whole, THIRDS_BALLS[:2], fuel=256)
    assert not cov.certificate
    assert len(cov.pieces) == 2


def test_cover_ball_validation():
    whole = RecCompactSet.whole(CircleSpace())
    with pytest.raises(ValueError):
        covers.cover_from_balls(whole, (), fuel=64)
    with pytest.raises(ValueError):
        covers.cover_from_balls(whole, ((Fraction(0), Fraction(0)),), fuel=64)


def test_piece_diameter_bound():
    whole = RecCompactSet.whole(CircleSpace())
    cov = thirds_cover(whole)
    eps = Fraction(1, 1 << 20)
    assert cov.piece_diameter_bound(0, bits=20) == THIRD + eps
    joined = covers.join_covers(cov, cov)
    # piece 0 meet 2: min over ball pairs, the cross pair is tightest
    idx = [p.closed.name for p in joined.pieces].index("0 meet 2")
    assert joined.piece_diameter_bound(idx, bits=20) == THIRD + eps


# ----------------------------------------------------------------- joins

def test_join_keeps_boundary_singletons():
    # off-diagonal closed intersections are single points such as {0};
    # their open proxies are empty but the pieces must survive pruning
    whole = RecCompactSet.whole(CircleSpace())
    cov = thirds_cover(whole)
    joined = covers.join_covers(cov, cov, prune_fuel=256)
    assert len(joined.pieces) == 9
    assert joined.certificate
    idx = [p.closed.name for p in joined.pieces].index("0 meet 2")
    assert joined.pieces[idx].open_regions == ()
    assert joined.pieces[idx].closed.membership_test(Fraction(0), 20) is True


def test_join_prunes_truly_empty_pairs():
    whole = RecCompactSet.whole(IntervalSpace())
    cov = covers.cover_from_balls(whole, THIRDS_BALLS, fuel=64)
    joined = covers.join_covers(cov, cov, prune_fuel=256)
    names = sorted(p.closed.name for p in joined.pieces)
    assert names == ["0 meet 0", "0 meet 1", "1 meet 0", "1 meet 1",
                     "1 meet 2", "2 meet 1", "2 meet 2"]


def test_join_requires_shared_carrier():
    a = thirds_cover(RecCompactSet.whole(CircleSpace()))
    b = thirds_cover(RecCompactSet.whole(CircleSpace()))
    with pytest.raises(ValueError):
        covers.join_covers(a, b)


def test_join_certificate_needs_both():
    whole = RecCompactSet.whole(CircleSpace())
    good = thirds_cover(whole)
    bad = covers.cover_from_balls(whole, THIRDS_BALLS[:2], fuel=64)
    assert not covers.join_covers(good, bad).certificate


# ---------------------------------------------------------- pattern sets

def test_preimage_closed_membership_and_regions():
    space = CantorSpace.alphabet(2)
    whole = RecCompactSet.whole(space)
    c1 = covers.refine_cover_sequence(whole, 1, zero_dim=True, fuel=64)
    odo = odometer_map(space)
    pre = covers.preimage_closed(odo, c1.pieces[1].closed)
    # 0^inf maps to 10^inf, which starts with 1
    assert pre.membership_test(((), 0), 20) is True
    assert pre.membership_test(((1,), 0), 20) is False
    # the preimage is the 0-cylinder, so its complement is the 1-box
    assert pre.complement_regions(16) == (space.cylinder((1,)),)


def test_preimage_closed_space_mismatch():
    space = CantorSpace.alphabet(2)
    other = CircleSpace()
    odo = odometer_map(space)
    closed = EffClosedSet.whole(other)
    with pytest.raises(ValueError):
        covers.preimage_closed(odo, closed)


def test_dp_set_validation():
    space = CantorSpace.alphabet(2)
    whole = RecCompactSet.whole(space)
    c1 = covers.refine_cover_sequence(whole, 1, zero_dim=True, fuel=64)
    odo = odometer_map(space)
    from edyn.groups import PatternCoding
    with pytest.raises(ValueError):
        covers.dp_set(PatternCoding((((), 7),)), {"a": odo}, c1)
    with pytest.raises(ValueError):
        covers.dp_set(PatternCoding(((("b",), 0),)), {"a": odo}, c1)
    whole_set = covers.dp_set(PatternCoding(()), {"a": odo}, c1)
    assert whole_set.membership_test(((), 0), 20) is True


def test_dp_set_emptiness_matches_dynamics():
    space = CantorSpace.alphabet(2)
    whole = RecCompactSet.whole(space)
    c1 = covers.refine_cover_sequence(whole, 1, zero_dim=True, fuel=64)
    odo = odometer_map(space)
    from edyn.groups import PatternCoding
    maps = {"a": odo}
    same = covers.dp_set(PatternCoding((((), 0), (("a",), 0))), maps, c1)
    assert semi_decide_empty(same, whole, 64)
    alternating = covers.dp_set(PatternCoding((((), 0), (("a",), 1))), maps, c1)
    assert not semi_decide_empty(alternating, whole, 1 << 10)
    assert alternating.membership_test(((), 0), 20) is True


# ------------------------------------------------- forbidden enumerators

def test_odometer_radius_one_table():
    space = CantorSpace.alphabet(2)
    whole = RecCompactSet.whole(space)
    c1 = covers.refine_cover_sequence(whole, 1, zero_dim=True, fuel=64)
    enum = covers.subshift_cover_forbidden({"a": odometer_map(space)}, c1, radius=1)
    assert emitted_tables(enum, 1 << 14) == [(0, 0), (1, 1)]
    realizable = {tuple(lbl[0] for lbl in pat)
                  for pat in oracles.odometer_realizable_patterns(1, 1)}
    assert realizable == {(0, 1), (1, 0)}


def test_odometer_radius_two_table():
    space = CantorSpace.alphabet(2)
    whole = RecCompactSet.whole(space)
    c1 = covers.refine_cover_sequence(whole, 1, zero_dim=True, fuel=64)
    enum = covers.subshift_cover_forbidden({"a": odometer_map(space)}, c1, radius=2)
    realizable = {tuple(lbl[0] for lbl in pat)
                  for pat in oracles.odometer_realizable_patterns(1, 2)}
    want = sorted(t for t in itertools.product((0, 1), repeat=3)
                  if t not in realizable)
    assert emitted_tables(enum, 1 << 14) == want


def test_rotation_third_table():
    space = CircleSpace()
    whole = RecCompactSet.whole(space)
    cov = thirds_cover(whole)
    enum = covers.subshift_cover_forbidden({"a": rotation_map(space, THIRD)},
                                           cov, radius=2)
    want = sorted(oracles.rotation_forbidden_table(THIRD, THIRDS_ARCS, 2))
    assert emitted_tables(enum, 1 << 14) == want
    assert len(want) == 6


def test_rotation_quarter_table():
    space = CircleSpace()
    whole = RecCompactSet.whole(space)
    cov = thirds_cover(whole)
    enum = covers.subshift_cover_forbidden({"a": rotation_map(space, Fraction(1, 4))},
                                           cov, radius=2)
    want = sorted(oracles.rotation_forbidden_table(Fraction(1, 4), THIRDS_ARCS, 2))
    assert emitted_tables(enum, 1 << 14) == want
    assert len(want) == 18


def test_forbidden_enum_monotone_and_sound():
    space = CircleSpace()
    whole = RecCompactSet.whole(space)
    cov = thirds_cover(whole)
    enum = covers.subshift_cover_forbidden({"a": rotation_map(space, THIRD)},
                                           cov, radius=2)
    seen = set()
    for fuel in (4, 64, 1 << 10, 1 << 14):
        cur = enum.emit(fuel)
        assert seen <= cur
        seen = cur
    table = {pattern_symbols(p) for p in seen}
    for labels in itertools.product(range(3), repeat=3):
        if oracles.rotation_pattern_realizable(THIRD, THIRDS_ARCS, labels):
            assert labels not in table


def test_identity_system_on_disjoint_pieces():
    space = CantorSpace.alphabet(2)
    whole = RecCompactSet.whole(space)
    c1 = covers.refine_cover_sequence(whole, 1, zero_dim=True, fuel=64)
    enum = covers.subshift_cover_forbidden({"a": identity_map(space)}, c1, radius=1)
    assert emitted_tables(enum, 1 << 12) == [(0, 1), (1, 0)]


def test_identity_system_on_overlapping_pieces():
    # closed thirds pairwise intersect at endpoints, so nothing is forbidden
    space = CircleSpace()
    whole = RecCompactSet.whole(space)
    cov = thirds_cover(whole)
    enum = covers.subshift_cover_forbidden({"a": identity_map(space)}, cov, radius=1)
    assert enum.emit(1 << 12) == frozenset()


def test_forbidden_radius_validation():
    space = CircleSpace()
    cov = thirds_cover(RecCompactSet.whole(space))
    with pytest.raises(ValueError):
        covers.subshift_cover_forbidden({"a": identity_map(space)}, cov, radius=-1)
