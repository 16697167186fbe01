"""Cantor machinery: monotone machines, builtin systems against brute-force
oracles, clopen bases, and the binary encodings."""

import random
from fractions import Fraction

import pytest

from edyn.cantor import (ClopenPiece, MonotoneMachine, brouwer_encode,
                         builtin_system, clopen_basis, golden_mean_dense,
                         golden_mean_live, machine_to_map, machine_to_table)
from edyn.kernel.fuel import Enumerator
from edyn.kernel.maps import map_compose, pushforward_open
from edyn.kernel.regions import Box
from edyn.kernel.sets import (EffClosedSet, RecCompactSet, closed_to_compact,
                              covers_within)
from edyn.kernel.space import CantorSpace

from oracles import (all_words, eleven_free, eleven_free_words, kraft_sum,
                     odometer_inverse_point, odometer_point, odometer_word,
                     phi_int, phi_inv, prefix_replace, unary_prefix_codes)

G = CantorSpace.alphabet(2)


def box_word(box):
    return tuple(next(iter(s)) for _, s in box.entries)


# ------------------------------------------------------------- machines

def test_machine_preimage_cylinders_are_minimal():
    m = MonotoneMachine(lambda w: w[1:] if w else (), G, G, name="drop one")
    f = machine_to_map(m, EffClosedSet.whole(G))
    got = f.preimage_regions(G.cylinder((1,)), 1 << 6)
    words = sorted(box_word(b) for b in got)
    assert words == [(0, 1), (1, 1)]


def test_machine_identity_preimage_is_exact():
    m = MonotoneMachine(lambda w: w, G, G, name="id")
    f = machine_to_map(m, EffClosedSet.whole(G))
    got = f.preimage_regions(G.cylinder((0, 1)), 1 << 6)
    assert [box_word(b) for b in got] == [(0, 1)]


def test_step_checked_flags_nonmonotone_machines():
    def bad(w):
        return (1,) if len(w) == 1 else (0,) * len(w)

    m = MonotoneMachine(bad, G, G, name="bad")
    with pytest.raises(ValueError):
        m.step_checked((1, 0))


def test_machine_to_table_shape():
    _, maps = builtin_system("shift")
    table = machine_to_table(maps[0].machine, 3)
    assert table["partial_beyond_depth"] == 3
    assert {"word": [0, 1], "image": [1]} in table["entries"]
    words = [tuple(e["word"]) for e in table["entries"]]
    assert set(words) == set(w for d in range(4) for w in all_words(2, d)
                             if len(w) <= 3) | {()}


# ------------------------------------------------------------- odometer

def test_odometer_word_rules_match_oracle():
    _, (T, _) = builtin_system("odometer")
    for depth in range(1, 8):
        for word in all_words(2, depth):
            got = T.machine.step(word)
            assert got == odometer_word(word), word


def test_odometer_applies_match_oracle_exactly():
    _, (T, T_inv) = builtin_system("odometer")
    rng = random.Random(9)
    for _ in range(60):
        n = rng.randrange(7)
        word = tuple(rng.randrange(2) for _ in range(n))
        tail = rng.randrange(2)
        data = (word, tail)
        assert G.canonical_data(T.apply_data(data)) == odometer_point(word, tail)
        assert G.canonical_data(T_inv.apply_data(data)) == odometer_inverse_point(word, tail)


def test_odometer_roundtrip():
    _, (T, T_inv) = builtin_system("odometer")
    rng = random.Random(10)
    for _ in range(40):
        word = tuple(rng.randrange(2) for _ in range(rng.randrange(6)))
        tail = rng.randrange(2)
        data = (word, tail)
        there = G.canonical_data(T_inv.apply_data(T.apply_data(data)))
        assert there == G.canonical_data(data)


def test_odometer_native_preimages_are_exact_cylinders():
    _, (T, T_inv) = builtin_system("odometer")
    assert [box_word(b) for b in T.preimage_regions(G.cylinder((0, 0)), 8)] == [(1, 1)]
    assert [box_word(b) for b in T.preimage_regions(G.cylinder((0, 1, 1)), 8)] == [(1, 0, 1)]
    assert [box_word(b) for b in T_inv.preimage_regions(G.cylinder((1, 1)), 8)] == [(0, 0)]


def test_odometer_pushforward_exhausts_the_image_cylinder():
    # T maps [1] bijectively onto [0], so the closed-complement
    # construction recovers the full image
    _, (T, _) = builtin_system("odometer")
    sp = T.src
    u = pushforward_open(T, RecCompactSet.whole(sp), sp.cylinder((1,)))
    got = u.regions(1 << 10)
    assert covers_within(sp, got, 1 << 8, pieces=(sp.cylinder((0,)),))
    for b in got:
        assert b.allowed(0) == frozenset({0}), b


def test_odometer_composed_with_inverse_fixes_cylinders():
    _, (T, T_inv) = builtin_system("odometer")
    C = map_compose(T, T_inv)
    for w in [(0,), (1,), (0, 1), (1, 0, 1)]:
        pre = C.preimage_regions(G.cylinder(w), 1 << 6)
        assert pre and covers_within(G, pre, 1 << 8, pieces=(G.cylinder(w),)), w


def test_odometer_has_no_fixed_points():
    from edyn.kernel.maps import fixed_point_set
    from edyn.kernel.sets import semi_decide_empty
    _, (T, _) = builtin_system("odometer")
    sp = T.src
    fix = fixed_point_set(T, RecCompactSet.whole(sp))
    assert semi_decide_empty(fix, RecCompactSet.whole(sp), 1 << 6)


# ----------------------------------------------------- prefix replacement

def test_thompson_prefix_agrees_with_oracle():
    codes_in = ((0,), (1, 0), (1, 1))
    codes_out = ((0, 0), (0, 1), (1,))
    _, (F, F_inv) = builtin_system("thompson_prefix", (codes_in, codes_out))
    for depth in range(1, 7):
        for word in all_words(2, depth):
            got = F.machine.step(word)
            expect = prefix_replace(codes_in, codes_out, word)
            if expect is not None:
                assert got is not None and got[:len(expect)] == expect[:len(got)], word


def test_thompson_inverse_roundtrips_points():
    codes_in = ((0,), (1, 0), (1, 1))
    codes_out = ((0, 0), (0, 1), (1,))
    _, (F, F_inv) = builtin_system("thompson_prefix", (codes_in, codes_out))
    rng = random.Random(4)
    for _ in range(40):
        word = tuple(rng.randrange(2) for _ in range(8))
        data = (word, rng.randrange(2))
        back = G.canonical_data(F_inv.apply_data(F.apply_data(data)))
        assert back == G.canonical_data(data)


def test_thompson_rejects_incomplete_codes():
    with pytest.raises(ValueError):
        builtin_system("thompson_prefix", (((0,),), ((1,),)))
    with pytest.raises(ValueError):
        builtin_system("thompson_prefix", (((0,), (0, 1), (1,)), ((0,), (1, 0), (1, 1))))


# ------------------------------------------------------------ lamplighter

def test_phi_signed_position_oracle():
    assert [phi_int(n) for n in range(7)] == [0, -1, 1, -2, 2, -3, 3]
    for n in range(60):
        assert phi_inv(phi_int(n)) == n


def test_lamplighter_translation_rewires_by_signed_shift():
    _, (t, t_inv, a) = builtin_system("lamplighter")
    rng = random.Random(21)
    for _ in range(50):
        word = tuple(rng.randrange(2) for _ in range(rng.randrange(12)))
        data = (word, 0)
        out_word, out_tail = G.canonical_data(t.apply_data(data))
        # position n of the output reads position phi_inv(phi(n) + 1) of the input
        for n in range(10):
            src = phi_inv(phi_int(n) + 1)
            expect = word[src] if src < len(word) else 0
            got = out_word[n] if n < len(out_word) else out_tail
            assert got == expect, (word, n)


def test_lamplighter_translation_roundtrip():
    _, (t, t_inv, a) = builtin_system("lamplighter")
    rng = random.Random(22)
    for _ in range(50):
        word = tuple(rng.randrange(2) for _ in range(rng.randrange(10)))
        data = (word, rng.randrange(2))
        back = G.canonical_data(t_inv.apply_data(t.apply_data(data)))
        assert back == G.canonical_data(data)


def test_lamplighter_flip_toggles_origin():
    _, (t, t_inv, a) = builtin_system("lamplighter")
    w, tail = G.canonical_data(a.apply_data(((0, 1, 1), 0)))
    assert (w, tail) == ((1, 1, 1), 0)
    w, tail = G.canonical_data(a.apply_data(a.apply_data(((0, 1, 1), 0))))
    assert (w, tail) == ((0, 1, 1), 0)


def test_lamplighter_flip_preimage_is_itself():
    _, (t, t_inv, a) = builtin_system("lamplighter")
    got = a.preimage_regions(G.cylinder((1,)), 8)
    assert [box_word(b) for b in got] == [(0,)]


# ------------------------------------------------------------ golden mean

def test_golden_mean_membership_is_exact():
    carrier, _ = builtin_system("golden_mean_carrier")
    assert carrier.membership_test(((0, 1, 0, 1), 0), 8) is True
    assert carrier.membership_test(((1, 1), 0), 8) is False
    assert carrier.membership_test(((0,), 1), 8) is False  # tail of ones


def test_golden_mean_cover_acceptance():
    carrier, _ = builtin_system("golden_mean_carrier")
    sp = carrier.space
    k = closed_to_compact(carrier, RecCompactSet.whole(sp), name="gm")
    assert k.accepts([sp.cylinder((0,)), sp.cylinder((1, 0))], 1 << 8)
    assert not k.accepts([sp.cylinder((0,))], 1 << 8)


def test_golden_mean_shift_preserves_the_carrier():
    carrier, (s,) = builtin_system("golden_mean_carrier")
    sp = carrier.space
    rng = random.Random(6)
    for _ in range(40):
        while True:
            word = tuple(rng.randrange(2) for _ in range(8))
            if eleven_free(word):
                break
        out, tail = sp.canonical_data(s.apply_data((word, 0)))
        assert eleven_free(out), (word, out)


def test_golden_mean_dense_points_are_in_the_carrier():
    for i in range(120):
        word, tail = golden_mean_dense(i)
        assert tail == 0 and eleven_free(word), i


def test_golden_mean_live_matches_oracle():
    for depth in range(7):
        for word in all_words(2, depth):
            assert golden_mean_live(word) == eleven_free(word)


# ------------------------------------------------------------ clopen basis

def test_clopen_basis_on_whole_space_lists_cylinders():
    k = RecCompactSet.whole(G)
    pieces = clopen_basis(k, 1 << 9)
    words = {p.words for p in pieces}
    assert ((0,),) in words
    assert ((1,),) in words
    assert ((0,), (1,)) in words or ((0, 0), (0, 1), (1,)) in words


def test_clopen_basis_respects_carrier():
    carrier, _ = builtin_system("golden_mean_carrier")
    sp = carrier.space
    k = closed_to_compact(carrier, RecCompactSet.whole(sp), name="gm")
    pieces = clopen_basis(k, 1 << 9)
    words = {p.words for p in pieces}
    assert ((0,),) in words and ((1, 0),) in words and ((1,),) in words


def test_clopen_piece_normalizes_nested_words():
    assert ClopenPiece.normalize([(0, 1), (0,), (0, 1)]).words == ((0,),)


# --------------------------------------------------- strengthened encoding

@pytest.fixture(scope="module")
def golden_tree():
    carrier, _ = builtin_system("golden_mean_carrier")
    sp = carrier.space
    k = closed_to_compact(carrier, RecCompactSet.whole(sp), name="gm")
    return brouwer_encode(k, dense_points=golden_mean_dense,
                          no_isolated_points=True,
                          live_cylinder=golden_mean_live), sp


def test_golden_tree_level_depths_and_counts(golden_tree):
    (tree, fwd, bwd), sp = golden_tree
    assert [tree.levels.depth(n) for n in range(4)] == [1, 3, 5, 7]
    assert [tree.levels.count(n) for n in range(4)] == [2, 5, 13, 34]


def test_golden_tree_branching_and_suffixes(golden_tree):
    (tree, fwd, bwd), sp = golden_tree
    roots = tree.child_indices(())
    assert len(roots) == 2
    by_word = {tree.node_word((i,)): (i,) for i in roots}
    assert set(by_word) == {(0,), (1,)}
    assert len(tree.child_indices(by_word[(0,)])) == 3
    assert len(tree.child_indices(by_word[(1,)])) == 2
    assert tree.suffix_codes(()) == ((0,), (1,))
    assert tree.suffix_codes(by_word[(0,)]) == ((0,), (1, 0), (1, 1))


def test_golden_tree_kraft_sums_are_one(golden_tree):
    (tree, fwd, bwd), sp = golden_tree
    frontier = [()]
    for _ in range(3):
        nxt = []
        for nd in frontier:
            codes = tree.suffix_codes(nd)
            assert kraft_sum(codes) == Fraction(1), nd
            nxt.extend(nd + (i,) for i in tree.child_indices(nd))
        frontier = nxt


def test_golden_tree_codes_reach_every_binary_word(golden_tree):
    (tree, fwd, bwd), sp = golden_tree
    seen = set()
    frontier = [((), ())]
    while frontier:
        nd, code = frontier.pop()
        if len(code) >= 6:
            seen.add(code[:6])
            continue
        for i in tree.child_indices(nd):
            child = nd + (i,)
            frontier.append((child, tree.code(child)))
    assert len(seen) == 64


def test_golden_tree_codes_injective(golden_tree):
    (tree, fwd, bwd), sp = golden_tree
    frontier = [()]
    for _ in range(3):
        frontier = [nd + (i,) for nd in frontier for i in tree.child_indices(nd)]
    codes = [tree.code(nd) for nd in frontier]
    assert len(set(codes)) == len(codes)


def test_golden_tree_machines_roundtrip(golden_tree):
    (tree, fwd, bwd), sp = golden_tree
    for i in range(40):
        data = golden_mean_dense(i)
        word = tuple(sp.value_at(data, j) for j in range(13))
        enc = fwd.machine.step(word)
        assert enc is not None and len(enc) >= 6, (word, enc)
        dec = bwd.machine.step(enc)
        assert dec == word[:len(dec)] and len(dec) >= 5, (word, enc, dec)


def test_golden_tree_image_is_everything(golden_tree):
    (tree, fwd, bwd), sp = golden_tree
    assert bwd.domain.complement_items(1 << 10) == ()


def test_race_path_agrees_with_decider(golden_tree):
    (tree, fwd, bwd), sp = golden_tree
    carrier, _ = builtin_system("golden_mean_carrier")
    sp2 = carrier.space
    k = closed_to_compact(carrier, RecCompactSet.whole(sp2), name="gm")
    tree2, _, _ = brouwer_encode(k, dense_points=golden_mean_dense,
                                 no_isolated_points=True)
    assert [tree2.levels.depth(n) for n in range(3)] == \
        [tree.levels.depth(n) for n in range(3)]
    assert [tree2.levels.count(n) for n in range(3)] == \
        [tree.levels.count(n) for n in range(3)]


def test_unary_suffix_codes_match_oracle():
    assert unary_prefix_codes(2) == [(0,), (1,)]
    assert unary_prefix_codes(3) == [(0,), (1, 0), (1, 1)]
    for m in range(2, 9):
        assert kraft_sum(unary_prefix_codes(m)) == Fraction(1)


def test_tree_json_shape(golden_tree):
    (tree, fwd, bwd), sp = golden_tree
    js = tree.to_json(2)
    assert all(set(nd) == {"word", "code"} for nd in js["nodes"])
    assert all(isinstance(nd["word"], list) and isinstance(nd["code"], list)
               for nd in js["nodes"])


# ----------------------------------------------------------- plain encoding

def test_plain_encode_of_whole_space_roundtrips():
    W = RecCompactSet.whole(G)
    tree, fwd, bwd = brouwer_encode(W)
    for word in [(0,), (1,), (0, 1), (1, 1, 0)]:
        enc = fwd.machine.step(word)
        dec = bwd.machine.step(enc)
        assert dec == word[:len(dec)], (word, enc, dec)


def test_plain_encode_carves_nonnested_chains_soundly():
    W = RecCompactSet.whole(G)
    tree, fwd, bwd = brouwer_encode(W)
    items = bwd.domain.complement_items(1 << 7)
    assert items, "the full product tree has non-nested chains"
    for word in [(0, 0, 0, 0), (1, 1, 1, 1), (0, 1, 0, 1), (1, 0, 1, 1)]:
        enc = fwd.machine.step(word * 2)
        for box in items:
            u = box_word(box)
            if len(u) <= len(enc):
                assert enc[:len(u)] != u, (word, enc, u)


def test_plain_encode_of_singleton_carrier():
    def batch(t):
        return tuple(Box(((j, frozenset({1})),)) for j in range(t))

    single = EffClosedSet(G, Enumerator(batch), name="origin point",
                          membership=lambda data, bits: all(
                              G.value_at(data, j) == 0 for j in range(bits)))
    k = closed_to_compact(single, RecCompactSet.whole(G), name="origin point")
    tree, fwd, bwd = brouwer_encode(k)
    enc = fwd.machine.step((0,) * 8)
    dec = bwd.machine.step(enc)
    assert dec == (0,) * len(dec) and len(dec) >= 4
    assert bwd.domain.complement_items(1 << 9), "dead chains must be carved"


def test_encode_rejects_empty_carrier():
    empty = EffClosedSet(G, Enumerator.fixed((Box(()),)), name="empty",
                         membership=lambda data, bits: False)
    k = closed_to_compact(empty, RecCompactSet.whole(G), name="empty")
    with pytest.raises(ValueError, match="empty"):
        brouwer_encode(k)


def two_point_carrier():
    def batch(t):
        out = []
        for j in range(1, t + 1):
            out.append(Box(((0, frozenset({0})), (j, frozenset({1})))))
            out.append(Box(((0, frozenset({1})), (j, frozenset({0})))))
        return tuple(out)

    c = EffClosedSet(G, Enumerator(batch), name="two points",
                     membership=lambda data, bits: len(
                         {G.value_at(data, j) for j in range(max(bits, 1))}) == 1)
    return closed_to_compact(c, RecCompactSet.whole(G), name="two points")


def test_strengthened_encode_rejects_isolated_points():
    k = two_point_carrier()

    def dense(i):
        return ((), 0) if i % 2 == 0 else ((), 1)

    with pytest.raises(ValueError, match="branch"):
        tree, fwd, bwd = brouwer_encode(k, dense_points=dense,
                                        no_isolated_points=True)
        [tree.levels.depth(n) for n in range(2)]


def test_plain_encode_of_two_point_carrier_separates():
    k = two_point_carrier()
    tree, fwd, bwd = brouwer_encode(k)
    e0 = fwd.machine.step((0,) * 8)
    e1 = fwd.machine.step((1,) * 8)
    assert e0 != e1
    assert bwd.machine.step(e0) == (0,) * len(bwd.machine.step(e0))
    assert bwd.machine.step(e1) == (1,) * len(bwd.machine.step(e1))
