"""Symbolic box regions and the countable codings behind ball indices."""

import random
from fractions import Fraction

import pytest

from edyn import coding
from edyn.kernel.regions import (EMPTY, Box, box_complement, box_fix, box_make,
                                 box_subset)

from oracles import all_words, cylinder_points

SIZES = lambda j: 2


def box_points(box, depth):
    """All depth-prefixes of points inside a box over the binary alphabet."""
    out = []
    for word in all_words(2, depth):
        if all(word[c] in allowed for c, allowed in box.entries if c < depth):
            out.append(word)
    return out


def test_box_make_normalizes():
    b = box_make([(1, {0}), (0, {1})], SIZES)
    assert b.entries == ((0, frozenset({1})), (1, frozenset({0})))
    assert box_make([], SIZES) == Box(())
    assert box_make([(0, {0, 1})], SIZES) == Box(())  # full coordinate drops out
    assert box_make([(0, set())], SIZES) == EMPTY
    assert box_make([(0, {0}), (0, {1})], SIZES) == EMPTY


def test_box_make_merges_repeated_coordinates():
    b = box_make([(0, {0, 1}), (0, {1})], SIZES)
    assert b == Box(((0, frozenset({1})),))


def test_box_allowed_and_coords():
    b = box_make([(2, {1})], SIZES)
    assert b.allowed(2) == frozenset({1})
    assert b.allowed(5) is None  # unconstrained coordinate
    assert b.coords() == (2,)


def test_box_subset_on_samples():
    rng = random.Random(3)
    boxes = []
    for _ in range(40):
        entries = [(c, {rng.randrange(2)}) for c in rng.sample(range(4), rng.randrange(3))]
        b = box_make(entries, SIZES)
        if b != EMPTY:
            boxes.append(b)
    boxes.append(Box(()))
    for a in boxes:
        for b in boxes:
            pts_a = set(box_points(a, 4))
            pts_b = set(box_points(b, 4))
            assert box_subset(a, b) == (pts_a <= pts_b), (a, b)


def test_box_complement_covers_exactly_the_outside():
    b = box_make([(0, {0}), (2, {1})], SIZES)
    comp = box_complement(b, SIZES)
    pts = set(box_points(b, 3))
    comp_pts = set()
    for c in comp:
        cp = set(box_points(c, 3))
        assert not (cp & pts)
        comp_pts |= cp
    assert pts | comp_pts == set(all_words(2, 3))


def test_box_complement_of_whole_is_empty_family():
    assert box_complement(Box(()), SIZES) == []


def test_box_fix_refines_one_coordinate():
    b = Box(())
    parts = [box_fix(b, 1, s, SIZES) for s in (0, 1)]
    union = set()
    for p in parts:
        union |= set(box_points(p, 2))
    assert union == set(all_words(2, 2))


def test_pair_unpair_roundtrip():
    for n in range(200):
        a, b = coding.unpair(n)
        assert coding.pair(a, b) == n
    for a in range(20):
        for b in range(20):
            x, y = coding.unpair(coding.pair(a, b))
            assert (x, y) == (a, b)


def test_posrat_coding_roundtrip():
    assert coding.nat_to_posrat(0) == Fraction(1)
    assert coding.nat_to_posrat(1) == Fraction(1, 2)
    for n in range(300):
        q = coding.nat_to_posrat(n)
        assert q > 0
        assert coding.posrat_to_nat(q) == n


def test_posrat_coding_surjective_on_small_rationals():
    seen = {coding.nat_to_posrat(n) for n in range(1 << 12)}
    for num in range(1, 11):
        for den in range(1, 11):
            assert Fraction(num, den) in seen


def test_ball_code_roundtrip():
    for center in range(12):
        for k in range(6):
            r = Fraction(1, 1 << k)
            code = coding.ball_code(center, r)
            assert coding.ball_decode(code) == (center, r)


def test_ball_code_rejects_zero_radius():
    with pytest.raises(ValueError):
        coding.ball_code(0, Fraction(0))


def test_list_coding_roundtrip():
    for n in range(200):
        xs = coding.nat_to_list(n)
        assert coding.list_to_nat(xs) == n
    assert coding.nat_to_list(0) == []


def test_word_rank_unrank_is_length_then_lex():
    sizes = lambda j: 2
    words = [coding.word_unrank(i, sizes) for i in range(15)]
    assert words[0] == ()
    assert words[1:3] == [(0,), (1,)]
    assert words[3:7] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    for i, w in enumerate(words):
        assert coding.word_rank(w, sizes) == i


def test_word_rank_unrank_mixed_alphabet():
    sizes = lambda j: 3 if j == 0 else 2
    for i in range(100):
        w = coding.word_unrank(i, sizes)
        assert coding.word_rank(w, sizes) == i
        assert all(s < sizes(j) for j, s in enumerate(w))


def test_cylinder_points_oracle_consistency():
    # the test oracle agrees with direct box filtering
    b = box_make([(0, {1}), (1, {0})], SIZES)
    assert set(box_points(b, 3)) == set(cylinder_points((1, 0), 3))
