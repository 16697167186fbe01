"""Cantor-space machinery: monotone word machines, clopen bases, and
binary encodings of zero-dimensional recursively compact carriers.

A self-map of a Cantor space is computable exactly when it is induced by
a prefix-monotone word transformer, so machines are the common backbone:
the builtin systems (shift, odometer, prefix replacements, lamplighter
generators) are machine-backed maps with exact region hooks layered on
top where the arithmetic permits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from edyn import coding
from edyn.kernel.fuel import Enumerator, StagedQuery
from edyn.kernel.regions import EMPTY, Box, box_complement, box_make
from edyn.kernel.sets import EffClosedSet, RecCompactSet, compact_to_closed
from edyn.kernel.space import CantorSpace
from edyn.kernel.maps import ComputableMap


def _prefix_word(box) -> tuple | None:
    """The word w with box = [w], or None if the box is not a prefix cylinder."""
    if not isinstance(box, Box):
        return None
    word = []
    for j, (c, syms) in enumerate(box.entries):
        if c != j or len(syms) != 1:
            return None
        word.append(next(iter(syms)))
    return tuple(word)


class MonotoneMachine:
    """Prefix-monotone word transformer between Cantor spaces.

    step maps a finite source word to a finite target word or None where
    undefined.  Monotonicity (u prefix of v implies step(u) prefix of
    step(v), when both are defined) is verified lazily against the
    nearest defined ancestor whenever a word is evaluated; a violation
    is a hard error, since it means the machine does not induce a map.
    Unbounded output length along the domain is the caller's contract.
    """

    def __init__(self, step, src: CantorSpace, dst: CantorSpace, name: str = ""):
        self._step = step
        self.src = src
        self.dst = dst
        self.name = name

    def step(self, word) -> tuple | None:
        out = self._step(tuple(word))
        return None if out is None else tuple(out)

    def step_checked(self, word) -> tuple | None:
        word = tuple(word)
        out = self.step(word)
        if out is None:
            return None
        anc = word[:-1]
        while anc or word:
            prev = self.step(anc)
            if prev is not None:
                if out[:len(prev)] != prev:
                    raise ValueError(
                        f"machine {self.name!r} is not monotone at {word!r}: "
                        f"{prev!r} is not a prefix of {out!r}")
                break
            if not anc:
                break
            anc = anc[:-1]
        return out


def machine_to_map(m: MonotoneMachine, domain: EffClosedSet | None, *,
                   preimage_region=None, apply_data=None,
                   name: str = "") -> ComputableMap:
    """The computable map induced by a monotone machine.

    The preimage of a target cylinder [w] is enumerated as the minimal
    source cylinders [v] with step(v) extending w, in word-rank order.
    The image hint for a source cylinder [v] is the target cylinder
    [step(v)].  Exact hooks may be layered on top for maps whose region
    arithmetic is closed-form.
    """
    src, dst = m.src, m.dst

    def preimage_balls(ball_index: int, fuel: int):
        region = dst.decode_ball(ball_index)
        w = _prefix_word(region)
        if w is None:
            return ()
        out = []
        for r in range(fuel):
            v = coding.word_unrank(r, src.sizes)
            sv = m.step_checked(v)
            if sv is None or sv[:len(w)] != w:
                continue
            if v:
                parent = m.step(v[:-1])
                if parent is not None and parent[:len(w)] == w:
                    continue  # an ancestor already lands inside [w]
            out.append(src.cylinder(v))
        return tuple(out)

    def image_region(piece):
        v = _prefix_word(piece)
        if v is None:
            return None
        out = m.step_checked(v)
        return None if out is None else dst.cylinder(out)

    mp = ComputableMap(src, dst,
                       preimage_region=preimage_region,
                       preimage_balls=preimage_balls,
                       apply_data=apply_data,
                       image_region=image_region,
                       domain=domain,
                       name=name or m.name)
    mp.machine = m
    return mp


def machine_to_table(m: MonotoneMachine, depth: int) -> dict:
    """Finite table of the machine on all words up to the depth bound."""
    entries = []
    for n in range(depth + 1):
        for v in itertools.product(*(range(m.src.sizes(j)) for j in range(n))):
            out = m.step_checked(v)
            if out is not None:
                entries.append({"word": list(v), "image": list(out)})
    return {"entries": entries, "partial_beyond_depth": depth}


# ---------------------------------------------------------------------------
# clopen pieces


@dataclass(frozen=True, order=True)
class ClopenPiece:
    """Finite union of cylinders, in normal form: no word extends another."""

    words: tuple

    @staticmethod
    def normalize(words) -> "ClopenPiece":
        keep = []
        pool = sorted(set(tuple(w) for w in words), key=lambda w: (len(w), w))
        for w in pool:
            if not any(w[:len(u)] == u for u in keep):
                keep.append(w)
        return ClopenPiece(tuple(keep))

    def boxes(self, space: CantorSpace) -> tuple:
        return tuple(space.cylinder(w) for w in self.words)


def clopen_basis(k: RecCompactSet, fuel: int) -> tuple:
    """Certified clopen pieces of the carrier, fuel-monotonically.

    Candidate cylinder unions V are enumerated by a fixed coding of
    finite word sets; V is emitted once the covering engine accepts that
    the carrier minus V lies inside the complement of V's closure, which
    certifies that V traces a clopen subset of the carrier.  The caller
    asserts zero-dimensionality; on carriers that are not, pieces simply
    fail to certify, never emit unsoundly.
    """
    space = k.space
    if not isinstance(space, CantorSpace):
        raise ValueError(f"clopen basis needs a cantor-type space, got {type(space).__name__}")
    queries = getattr(k, "_queries", None)
    if queries is None:
        queries = k._queries = {}

    def candidate(i: int) -> ClopenPiece | None:
        ranks = coding.nat_to_list(i)
        if not ranks:
            return None
        return ClopenPiece.normalize(coding.word_unrank(r, space.sizes) for r in ranks)

    out = set()
    for i in range(fuel):
        piece = candidate(i)
        if piece is None:
            continue
        key = ("clopen", piece.words)
        if key not in queries:
            boxes = piece.boxes(space)
            outside = space.complement_of_union(boxes)
            targets = outside + boxes

            def check(t, targets=targets):
                return targets if k.covers_at_stage(targets, t) else None

            queries[key] = StagedQuery(check)
        if queries[key].query(fuel).accepted:
            out.add(piece)
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# encoder trees

_LIVE_CAP = 1 << 18
_LEVEL_SEARCH_SPAN = 16


class _PlainLevels:
    """All words of length n+1 at level n, in radix (lex) order, virtual."""

    def __init__(self, space: CantorSpace):
        self.space = space

    def depth(self, n: int) -> int:
        return n + 1

    def count(self, n: int) -> int:
        out = 1
        for j in range(n + 1):
            out *= self.space.sizes(j)
        return out

    def word(self, n: int, i: int) -> tuple:
        depth = n + 1
        syms = []
        for j in reversed(range(depth)):
            i, r = divmod(i, self.space.sizes(j))
            syms.append(r)
        return tuple(reversed(syms))

    def index(self, n: int, w) -> int | None:
        if len(w) != n + 1:
            return None
        i = 0
        for j, s in enumerate(w):
            i = i * self.space.sizes(j) + s
        return i


class _LiveLevels:
    """Nonempty-trace words per level, with greedy branching depths.

    Liveness of a cylinder is decided by an exact decider when one is
    supplied, else by racing the carrier's emptiness semi-decision
    against a search for a dense point inside the cylinder; both race
    sides are total on a computably closed carrier.  The emptiness side
    runs on a square-root budget so a live cylinder only pays linear
    covering work while waiting for its witness.
    """

    def __init__(self, k: RecCompactSet, dense_points, live_cylinder=None):
        self.k = k
        self.space = k.space
        self.dense = dense_points
        self.live_cylinder = live_cylinder
        self._live: dict[tuple, bool] = {}
        self._points: list = []
        self._depths: list[int] = []
        self._words: list[tuple] = []

    def _is_live(self, word: tuple) -> bool:
        word = tuple(word)
        if word not in self._live:
            self._live[word] = self._decide(word)
        return self._live[word]

    def _point_in_cylinder(self, data, word) -> bool:
        return all(self.space.value_at(data, j) == s for j, s in enumerate(word))

    def _decide(self, word: tuple) -> bool:
        if self.live_cylinder is not None:
            return bool(self.live_cylinder(word))
        if self.dense is None:
            raise ValueError("deciding cylinder liveness needs dense points or a decider")
        cyl = self.space.cylinder(word)
        closed = EffClosedSet.from_complement_items(
            self.space, tuple(box_complement(cyl, self.space.sizes)))
        piece = self.k.restrict(closed)
        t = 1
        while t <= _LIVE_CAP:
            while len(self._points) < t:
                self._points.append(self.dense(len(self._points)))
            for i in range(t // 2, t):
                if self._point_in_cylinder(self._points[i], word):
                    return True
            if piece.accepts([], 1 << (t.bit_length() // 2)).accepted:
                return False
            t *= 2
        raise ValueError(f"cannot decide whether cylinder {word!r} meets the carrier")

    def _live_extensions(self, word: tuple, depth: int) -> list:
        # dead prefixes have dead extensions, so prune whole subtrees
        frontier = [tuple(word)]
        for j in range(len(word), depth):
            frontier = [f + (s,) for f in frontier
                        for s in range(self.space.sizes(j))
                        if self._is_live(f + (s,))]
        return frontier

    def _extend(self, n: int) -> None:
        while len(self._depths) <= n:
            if not self._depths:
                d = 1
                while len(self._live_extensions((), d)) < 2:
                    d += 1
                    if d > _LEVEL_SEARCH_SPAN:
                        raise ValueError("carrier does not branch: isolated point or empty")
                self._depths.append(d)
                self._words.append(tuple(sorted(self._live_extensions((), d))))
                continue
            base = self._depths[-1]
            parents = self._words[-1]
            d = base + 1
            while True:
                table = [self._live_extensions(w, d) for w in parents]
                if all(len(v) >= 2 for v in table):
                    break
                d += 1
                if d > base + _LEVEL_SEARCH_SPAN:
                    raise ValueError("carrier does not branch: isolated point")
            self._depths.append(d)
            self._words.append(tuple(sorted(itertools.chain.from_iterable(table))))

    def depth(self, n: int) -> int:
        self._extend(n)
        return self._depths[n]

    def count(self, n: int) -> int:
        self._extend(n)
        return len(self._words[n])

    def word(self, n: int, i: int) -> tuple:
        self._extend(n)
        return self._words[n][i]

    def index(self, n: int, w) -> int | None:
        self._extend(n)
        w = tuple(w)
        words = self._words[n]
        lo, hi = 0, len(words)
        while lo < hi:
            mid = (lo + hi) // 2
            if words[mid] < w:
                lo = mid + 1
            else:
                hi = mid
        return lo if lo < len(words) and words[lo] == w else None


class EncoderTree:
    """Finitely branching index tree with unary suffix codes at each node.

    Nodes are finite words of child indices (root = empty).  Level n
    indices point into a per-level list of carrier cylinder words in lex
    order, so sibling order is lexicographic.  In a nested tree, a node
    is valid only when its level words form a prefix chain; the plain
    tree admits every index combination and leaves the chain condition
    to the encoded set.  Each node's children carry the suffix codes
    0, 10, ..., 1^(m-1) 0, 1^m, a complete prefix code.
    """

    def __init__(self, levels, nested: bool, name: str = ""):
        self.levels = levels
        self.nested = nested
        self.name = name
        self._codes: dict[tuple, tuple] = {(): ()}

    # -- structure ---------------------------------------------------------
    def level_depth(self, n: int) -> int:
        return self.levels.depth(n)

    def node_word(self, node: tuple) -> tuple:
        node = tuple(node)
        if not node:
            return ()
        return self.levels.word(len(node) - 1, node[-1])

    def node_namer(self, node) -> bool:
        node = tuple(node)
        prev = ()
        for n, i in enumerate(node):
            if not isinstance(i, int) or i < 0 or i >= self.levels.count(n):
                return False
            w = self.levels.word(n, i)
            if self.nested and w[:len(prev)] != prev:
                return False
            prev = w
        return True

    def child_indices(self, node: tuple) -> tuple:
        node = tuple(node)
        n = len(node)
        if not self.nested:
            return tuple(range(self.levels.count(n)))
        prev = self.node_word(node)
        return tuple(i for i in range(self.levels.count(n))
                     if self.levels.word(n, i)[:len(prev)] == prev)

    def children(self, node: tuple) -> tuple:
        return tuple(tuple(node) + (i,) for i in self.child_indices(node))

    # -- codes ---------------------------------------------------------------
    @staticmethod
    def _suffix(count: int, p: int) -> tuple:
        if count < 2:
            raise ValueError(f"encoder node with {count} children cannot carry a prefix code")
        m = count - 1
        return (1,) * p + ((0,) if p < m else ())

    def suffix_codes(self, node: tuple) -> tuple:
        count = len(self.child_indices(node))
        return tuple(self._suffix(count, p) for p in range(count))

    def code(self, node: tuple) -> tuple:
        node = tuple(node)
        if node not in self._codes:
            parent = node[:-1]
            siblings = self.child_indices(parent)
            p = siblings.index(node[-1])
            self._codes[node] = self.code(parent) + self._suffix(len(siblings), p)
        return self._codes[node]

    def decode(self, bits) -> tuple:
        """Deepest node decided by a binary word, with the bits consumed."""
        bits = tuple(bits)
        node = ()
        used = 0
        while True:
            siblings = self.child_indices(node)
            if len(siblings) < 2:
                raise ValueError(f"node {node!r} does not branch, codes are undefined")
            m = len(siblings) - 1
            z = 0
            while z < m and used + z < len(bits) and bits[used + z] == 1:
                z += 1
            if z == m:
                p, take = m, m
            elif used + z < len(bits) and bits[used + z] == 0:
                p, take = z, z + 1
            else:
                return node, used
            node = node + (siblings[p],)
            used += take

    def to_json(self, depth: int) -> dict:
        """Nodes of the first levels with their codes, breadth-first."""
        nodes = []
        frontier = [()]
        for _ in range(depth):
            nxt = []
            for nd in frontier:
                for child in self.children(nd):
                    nodes.append({"word": list(child), "code": list(self.code(child))})
                    nxt.append(child)
            frontier = nxt
        return {"nodes": nodes}


def brouwer_encode(k: RecCompactSet, *, dense_points=None,
                   no_isolated_points: bool = False, live_cylinder=None,
                   fuel: int = 1 << 12, name: str = "") -> tuple:
    """Encode a zero-dimensional carrier into the binary Cantor space.

    Returns (tree, forward, backward): the level/index tree with its
    suffix codes, the carrier-to-code map, and the code-to-carrier map.
    The image of the carrier is an effectively closed set of codes,
    available as backward.domain.  With cylinder liveness available
    (dense points or an exact live_cylinder decider) and no isolated
    points asserted, the levels are pruned to live cylinders and forced
    to branch, which makes the image the whole binary space.
    """
    space = k.space
    if not isinstance(space, CantorSpace):
        raise ValueError(f"encoding needs a cantor-type space, got {type(space).__name__}")
    # Probe budget stays small: a nonempty carrier never accepts, so the
    # probe would otherwise burn every stage up to the full fuel.
    if k.accepts([], min(fuel, 1 << 8)).accepted:
        raise ValueError("empty space has no encoding")
    strengthened = no_isolated_points and (
        dense_points is not None or live_cylinder is not None)
    if strengthened:
        levels = _LiveLevels(k, dense_points, live_cylinder)
    else:
        levels = _PlainLevels(space)
    tree = EncoderTree(levels, nested=strengthened, name=name or "encoder")
    binary = CantorSpace.alphabet(2)

    # ---- the encoded set E -------------------------------------------------
    if strengthened:
        image = EffClosedSet(binary, Enumerator.fixed(()),
                             name=f"{tree.name} image",
                             membership=lambda data, bits: True)
    else:
        empties: dict[tuple, StagedQuery] = {}

        def empty_query(word: tuple) -> StagedQuery:
            if word not in empties:
                cyl = space.cylinder(word)
                closed = EffClosedSet.from_complement_items(
                    space, tuple(box_complement(cyl, space.sizes)))
                piece = k.restrict(closed)

                def check(t, piece=piece):
                    r = piece.accepts([], t)
                    return ("empty",) if r.accepted else None

                empties[word] = StagedQuery(check)
            return empties[word]

        def batch(t: int):
            out = []
            frontier = [()]
            budget = t
            while frontier and budget > 0:
                node = frontier.pop(0)
                word = tree.node_word(node)
                n = len(node)
                for i in tree.child_indices(node):
                    budget -= 1
                    if budget < 0:
                        break
                    child = node + (i,)
                    cw = levels.word(n, i)
                    if cw[:len(word)] != word:
                        out.append(binary.cylinder(tree.code(child)))
                    # square-root budget: a live cylinder never accepts, so
                    # it should only pay linear covering work per stage
                    elif empty_query(cw).query(1 << (t.bit_length() // 2)).accepted:
                        out.append(binary.cylinder(tree.code(child)))
                    else:
                        frontier.append(child)
            return out

        image = EffClosedSet(binary, Enumerator(batch), name=f"{tree.name} image")

    # ---- forward: carrier word -> code ------------------------------------
    def step_fwd(v: tuple) -> tuple | None:
        out = []
        node = ()
        n = 0
        while levels.depth(n) <= len(v):
            w = v[:levels.depth(n)]
            i = levels.index(n, w)
            if i is None:
                break
            siblings = tree.child_indices(node)
            if i not in siblings:
                break
            out.extend(tree._suffix(len(siblings), siblings.index(i)))
            node = node + (i,)
            n += 1
        return tuple(out)

    # ---- backward: code -> carrier word ------------------------------------
    def step_bwd(u: tuple) -> tuple | None:
        node, _ = tree.decode(u)
        word = ()
        for n, i in enumerate(node):
            w = levels.word(n, i)
            if w[:len(word)] != word:
                break  # off the nested part: the output freezes
            word = w
        return word

    carrier = compact_to_closed(k, name=f"{tree.name} carrier")
    fwd = machine_to_map(MonotoneMachine(step_fwd, space, binary, name=f"{tree.name} code"),
                         carrier)
    bwd = machine_to_map(MonotoneMachine(step_bwd, binary, space, name=f"{tree.name} decode"),
                         image)
    return tree, fwd, bwd


# ---------------------------------------------------------------------------
# builtin systems


def _add_one_word(word: tuple) -> tuple:
    """Binary add-one with carry, truncated to the word's length."""
    out = []
    for i, b in enumerate(word):
        if b == 1:
            out.append(0)
        else:
            return tuple(out) + (1,) + tuple(word[i + 1:])
    return tuple(out)


def _sub_one_word(word: tuple) -> tuple:
    out = []
    for i, b in enumerate(word):
        if b == 0:
            out.append(1)
        else:
            return tuple(out) + (0,) + tuple(word[i + 1:])
    return tuple(out)


def _shift_map(space: CantorSpace, carrier: EffClosedSet, name: str = "shift") -> ComputableMap:
    def pre(region):
        if not isinstance(region, Box):
            return None
        return box_make([(c + 1, set(s)) for c, s in region.entries], space.sizes)

    def apply(data):
        word, tail = data
        return space.canonical_data((tuple(word[1:]), tail))

    m = MonotoneMachine(lambda w: w[1:], space, space, name=name)
    mp = machine_to_map(m, carrier, preimage_region=pre, apply_data=apply, name=name)

    def image_region(piece):
        if not isinstance(piece, Box):
            return None
        return box_make([(c - 1, set(s)) for c, s in piece.entries if c >= 1], space.sizes)

    mp._image_region = image_region  # total on boxes, sharper than the machine hint
    return mp


def _odometer_maps(space: CantorSpace, carrier: EffClosedSet) -> list:
    def pre_add(region):
        w = _prefix_word(region)
        return space.cylinder(_sub_one_word(w)) if w is not None else None

    def pre_sub(region):
        w = _prefix_word(region)
        return space.cylinder(_add_one_word(w)) if w is not None else None

    def apply_add(data):
        word, tail = data
        if 0 in word:
            i = word.index(0)
            return space.canonical_data(((0,) * i + (1,) + tuple(word[i + 1:]), tail))
        if tail == 1:
            return ((), 0)  # all ones rolls over to all zeros
        return (word and ((0,) * len(word) + (1,), 0)) or ((1,), 0)

    def apply_sub(data):
        word, tail = data
        if 1 in word:
            i = word.index(1)
            return space.canonical_data(((1,) * i + (0,) + tuple(word[i + 1:]), tail))
        if tail == 0:
            return ((), 1)
        return (word and ((1,) * len(word) + (0,), 1)) or ((0,), 1)

    fwd = machine_to_map(MonotoneMachine(_add_one_word, space, space, name="odometer"),
                         carrier, preimage_region=pre_add, apply_data=apply_add,
                         name="odometer")
    bwd = machine_to_map(MonotoneMachine(_sub_one_word, space, space, name="odometer inverse"),
                         carrier, preimage_region=pre_sub, apply_data=apply_sub,
                         name="odometer inverse")
    return [fwd, bwd]


def _validate_prefix_code(codes, side: str) -> tuple:
    codes = tuple(tuple(w) for w in codes)
    if not codes:
        raise ValueError(f"{side} prefix code is empty")
    for a in codes:
        for b in codes:
            if a != b and b[:len(a)] == a:
                raise ValueError(f"{side} code {a!r} is a prefix of {b!r}")
    if sum(Fraction(1, 2 ** len(w)) for w in codes) != 1:
        raise ValueError(f"{side} prefix code does not partition the space")
    return codes


def _prefix_replacement_step(codes_in, codes_out):
    def step(w):
        for u, v in zip(codes_in, codes_out):
            if w[:len(u)] == u:
                return v + tuple(w[len(u):])
        return None
    return step


def _thompson_map(space: CantorSpace, carrier: EffClosedSet,
                  codes_in, codes_out, name: str) -> ComputableMap:
    def pre(region):
        w = _prefix_word(region)
        if w is None:
            return None
        out = []
        for u, v in zip(codes_in, codes_out):
            if w[:len(v)] == v:
                out.append(space.cylinder(u + tuple(w[len(v):])))
            elif v[:len(w)] == w:
                out.append(space.cylinder(u))
        return tuple(out) if out else EMPTY

    horizon = max(len(u) for u in codes_in)

    def apply(data):
        word, tail = data
        probe = tuple(space.value_at(data, j) for j in range(horizon + len(word)))
        for u, v in zip(codes_in, codes_out):
            if probe[:len(u)] == u:
                rest = tuple(space.value_at(data, j) for j in range(len(u), max(len(u), len(word))))
                return space.canonical_data((v + rest, tail))
        raise AssertionError("complete prefix code failed to match")

    m = MonotoneMachine(_prefix_replacement_step(codes_in, codes_out), space, space, name=name)
    return machine_to_map(m, carrier, preimage_region=pre, apply_data=apply, name=name)


def _signed_index(n: int) -> int:
    """0, -1, 1, -2, 2, ...: the integer at position n of the folding."""
    return (n + 1) // 2 if n % 2 == 0 else -((n + 1) // 2)


def _signed_position(z: int) -> int:
    if z == 0:
        return 0
    return 2 * z if z > 0 else -2 * z - 1


def _rewire_map(space: CantorSpace, carrier: EffClosedSet, source_of, target_of,
                name: str) -> ComputableMap:
    """Coordinate rewiring: output position n copies input position source_of(n)."""

    def pre(region):
        if not isinstance(region, Box):
            return None
        return box_make([(source_of(c), set(s)) for c, s in region.entries], space.sizes)

    def image_region(piece):
        if not isinstance(piece, Box):
            return None
        return box_make([(target_of(c), set(s)) for c, s in piece.entries], space.sizes)

    def apply(data):
        word, tail = data
        needed = [source_of(n) for n in range(2 * len(word) + 4)]
        out = tuple(space.value_at(data, j) for j in needed)
        return space.canonical_data((out, tail))

    def step(w):
        out = []
        n = 0
        while source_of(n) < len(w):
            out.append(w[source_of(n)])
            n += 1
        return tuple(out)

    m = MonotoneMachine(step, space, space, name=name)
    mp = machine_to_map(m, carrier, preimage_region=pre, apply_data=apply, name=name)
    mp._image_region = image_region
    return mp


def _lamplighter_maps(space: CantorSpace, carrier: EffClosedSet) -> list:
    def ahead(n):  # input position feeding output n under the left shift
        return _signed_position(_signed_index(n) + 1)

    def behind(n):
        return _signed_position(_signed_index(n) - 1)

    t = _rewire_map(space, carrier, ahead, behind, "lamp shift")
    t_inv = _rewire_map(space, carrier, behind, ahead, "lamp shift inverse")

    def pre_flip(region):
        if not isinstance(region, Box):
            return None
        return box_make([(c, {1 - x for x in s} if c == 0 else set(s))
                         for c, s in region.entries], space.sizes)

    def apply_flip(data):
        word, tail = data
        if not word:
            word = (tail,)
        return space.canonical_data(((1 - word[0],) + tuple(word[1:]), tail))

    def step_flip(w):
        return ((1 - w[0],) + tuple(w[1:])) if w else ()

    m = MonotoneMachine(step_flip, space, space, name="lamp flip")
    a = machine_to_map(m, carrier, preimage_region=pre_flip, apply_data=apply_flip,
                       name="lamp flip")
    a._image_region = pre_flip  # an involution: image rule equals preimage rule
    return [t, t_inv, a]


def _golden_mean_closed(space: CantorSpace) -> EffClosedSet:
    def batch(t: int):
        return [box_make([(j, {1}), (j + 1, {1})], space.sizes) for j in range(t)]

    def membership(data, bits):
        word, tail = data
        if tail == 1:
            return False  # the constant tail repeats the forbidden pair
        return all(not (a == 1 and b == 1) for a, b in zip(word, word[1:]))

    return EffClosedSet(space, Enumerator(batch), name="golden mean carrier",
                        membership=membership)


def golden_mean_dense(i: int):
    """Dense sequence in the golden-mean carrier: finite 11-free words padded with zeros."""
    word = coding.word_unrank(i, lambda k: 2)
    word = tuple(s if not (s == 1 and j and word[j - 1] == 1) else 0
                 for j, s in enumerate(word))
    return (word, 0)


def golden_mean_live(word) -> bool:
    """Whether a cylinder meets the golden-mean carrier: the word is 11-free."""
    word = tuple(word)
    return all(not (a == 1 and b == 1) for a, b in zip(word, word[1:]))


def builtin_system(name: str, params=None) -> tuple:
    """A named carrier with its generator maps.

    shift, odometer, lamplighter and thompson_prefix act on the full
    binary Cantor space; golden_mean_carrier is the 11-free subshift
    with its shift.  Odometer and lamplighter return both directions of
    their generators; thompson_prefix takes params = (codes_in,
    codes_out), two complete prefix codes of equal cardinality.
    """
    space = CantorSpace.alphabet(2)
    whole = EffClosedSet.whole(space)
    if name == "shift":
        return whole, [_shift_map(space, whole)]
    if name == "odometer":
        return whole, _odometer_maps(space, whole)
    if name == "lamplighter":
        return whole, _lamplighter_maps(space, whole)
    if name == "thompson_prefix":
        if params is None or len(params) != 2:
            raise ValueError("thompson_prefix needs params = (codes_in, codes_out)")
        codes_in = _validate_prefix_code(params[0], "source")
        codes_out = _validate_prefix_code(params[1], "target")
        if len(codes_in) != len(codes_out):
            raise ValueError(
                f"prefix codes must pair up: {len(codes_in)} source vs {len(codes_out)} target")
        fwd = _thompson_map(space, whole, codes_in, codes_out, "prefix swap")
        bwd = _thompson_map(space, whole, codes_out, codes_in, "prefix swap inverse")
        return whole, [fwd, bwd]
    if name == "golden_mean_carrier":
        carrier = _golden_mean_closed(space)
        return carrier, [_shift_map(space, carrier, name="golden mean shift")]
    raise ValueError(f"unknown builtin system {name!r}")
