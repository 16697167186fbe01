"""Marked groups, pattern codings, and pullbacks to the free group.

A group enters through a symmetric generating alphabet and an oracle for
its word problem.  Codings assign symbols to finitely many words; their
consistency against the group, and the mismatch patterns that carve a
pulled-back full shift inside the free one, are fuel-bounded questions
answered through the kernel's semi-decision calculus.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .kernel.fuel import Enumerator, Refuted, SemiDecision, StagedQuery
from .kernel.regions import box_make
from .kernel.sets import EffClosedSet, RecCompactSet, semi_decide_empty
from .kernel.space import CantorSpace


# ---------------------------------------------------------------------------
# alphabets and words


@dataclass(frozen=True)
class GenAlphabet:
    """Symmetric generating alphabet: each letter paired with a formal inverse.

    pairs lists (generator, inverse); a self-inverse letter is declared by
    pairing it with itself.  The listed order fixes the symbol order used
    everywhere downstream (shortlex, enumeration sweeps).
    """

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((str(g), str(v)) for g, v in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        letters = list(self.symbols)
        if len(set(letters)) != len(letters):
            raise ValueError(f"generator letters must be distinct, got {letters}")
        if any(not g or not v for g, v in pairs):
            raise ValueError("letters must be nonempty strings")

    @property
    def symbols(self) -> tuple:
        out = []
        for g, v in self.pairs:
            out.append(g)
            if v != g:
                out.append(v)
        return tuple(out)

    @property
    def generators(self) -> tuple:
        return tuple(g for g, _ in self.pairs)

    def inverse(self, letter: str) -> str:
        for g, v in self.pairs:
            if letter == g:
                return v
            if letter == v:
                return g
        raise ValueError(f"unknown letter {letter!r}")

    def invert(self, word) -> tuple:
        return tuple(self.inverse(x) for x in reversed(tuple(word)))

    def parse(self, text: str) -> tuple:
        """Space-separated symbols, or one symbol per character."""
        parts = text.split() if " " in text else list(text)
        symbols = self.symbols
        for x in parts:
            if x not in symbols:
                raise ValueError(f"unknown letter {x!r}")
        return tuple(parts)

    def format(self, word) -> str:
        return " ".join(word) if any(len(x) > 1 for x in word) else "".join(word)


def reduce_word(alphabet: GenAlphabet, word) -> tuple:
    """Free reduction to the fixpoint: cancel adjacent formal inverse pairs."""
    symbols = alphabet.symbols
    out: list = []
    for x in tuple(word):
        if x not in symbols:
            raise ValueError(f"unknown letter {x!r}")
        if out and alphabet.inverse(out[-1]) == x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


# reduced-word streams in shortlex order, cached per alphabet
_WORD_LISTS: dict = {}


def _word_state(alphabet: GenAlphabet):
    st = _WORD_LISTS.get(alphabet)
    if st is None:
        st = {"words": [()], "index": {(): 0}, "layer": [()]}
        _WORD_LISTS[alphabet] = st
    return st


def _grow_words(alphabet: GenAlphabet, st) -> None:
    symbols = alphabet.symbols
    layer = [w + (s,) for w in st["layer"] for s in symbols
             if not (w and alphabet.inverse(w[-1]) == s)]
    st["layer"] = layer
    for w in layer:
        st["index"][w] = len(st["words"])
        st["words"].append(w)


def reduced_word_at(alphabet: GenAlphabet, i: int) -> tuple:
    """The i-th freely reduced word in shortlex order."""
    if i < 0:
        raise ValueError(f"word index must be nonnegative, got {i}")
    st = _word_state(alphabet)
    while len(st["words"]) <= i:
        if not st["layer"]:
            raise ValueError(f"only {len(st['words'])} reduced words exist")
        _grow_words(alphabet, st)
    return st["words"][i]


def reduced_rank(alphabet: GenAlphabet, word) -> int:
    """Shortlex position of a freely reduced word."""
    word = tuple(word)
    st = _word_state(alphabet)
    while word not in st["index"]:
        if not st["layer"] or len(st["layer"][0]) >= len(word):
            raise ValueError(f"word {word!r} is not freely reduced")
        _grow_words(alphabet, st)
    return st["index"][word]


def reduced_words_upto(alphabet: GenAlphabet, length: int) -> list:
    """All freely reduced words of length <= length, shortlex order."""
    st = _word_state(alphabet)
    while st["layer"] and len(st["layer"][0]) < length:
        _grow_words(alphabet, st)
    return [w for w in st["words"] if len(w) <= length]


# ---------------------------------------------------------------------------
# word problem oracles


@dataclass(frozen=True)
class WordProblemOracle:
    """Access to the word problem of a marked group.

    kind 'decidable' carries a total decider on reduced words; 're'
    carries a fuel-monotone enumerator of identity words (the relator
    closure); 'free' means free reduction alone settles equality.
    """

    kind: str
    decider: object = None
    closure: Enumerator | None = None

    def __post_init__(self):
        if self.kind not in ("decidable", "re", "free"):
            raise ValueError(f"unknown word problem kind {self.kind!r}")
        if self.kind == "decidable" and self.decider is None:
            raise ValueError("a decidable oracle needs a decider")
        if self.kind == "re" and self.closure is None:
            raise ValueError("an re oracle needs a closure enumerator")

    @staticmethod
    def decidable(decider) -> "WordProblemOracle":
        return WordProblemOracle("decidable", decider=decider)

    @staticmethod
    def free() -> "WordProblemOracle":
        return WordProblemOracle("free")

    @staticmethod
    def recursively_enumerable(closure: Enumerator) -> "WordProblemOracle":
        return WordProblemOracle("re", closure=closure)

    def identity_query(self, alphabet: GenAlphabet, word) -> StagedQuery:
        """Semi-decide that the word names the identity.

        Decidable and free oracles refute permanently on a no; the re
        oracle only ever accepts, by meeting the closure enumeration.
        """
        reduced = reduce_word(alphabet, word)

        def check(t: int):
            if reduced == ():
                return ((),)
            if self.kind == "free":
                raise Refuted("reduction is final in a free group")
            if self.kind == "decidable":
                if self.decider(reduced):
                    return (reduced,)
                raise Refuted("word problem decider answered no")
            if reduced in self.closure.emit(t):
                return (reduced,)
            return None

        return StagedQuery(check)

    def is_identity(self, alphabet: GenAlphabet, word, fuel: int) -> SemiDecision:
        return self.identity_query(alphabet, word).query(fuel)

    def equal(self, alphabet: GenAlphabet, u, v, fuel: int) -> SemiDecision:
        return self.is_identity(alphabet, tuple(u) + alphabet.invert(v), fuel)


def relator_closure(alphabet: GenAlphabet, relators, families=()) -> Enumerator:
    """Words of the normal closure of the relators, by reduced length.

    Stage t fixes caps from L = t.bit_length(): emitted words have
    reduced length at most 3 + (L-1)//4, conjugators run to length
    (L+3)//4, products to 1 + (L-1)//6 factors, and relator families
    are instantiated for indices up to (L+3)//4.  Products are explored
    breadth first with every intermediate word held inside the length
    cap, so each stage is finite and the order deterministic; every
    closure element appears once the caps outgrow some derivation of it.
    """
    base = tuple(reduce_word(alphabet, r) for r in relators)
    fams = tuple(families)

    def stage_batch(t: int):
        big = t.bit_length()
        len_cap = 3 + (big - 1) // 4
        conj_cap = (big + 3) // 4
        fac_cap = 1 + (big - 1) // 6
        fam_cap = (big + 3) // 4
        rels = list(base)
        for fam in fams:
            for k in range(1, fam_cap + 1):
                rels.append(reduce_word(alphabet, fam(k)))
        atoms = []
        seen = set()
        for g in reduced_words_upto(alphabet, conj_cap):
            for r in rels:
                for w in (r, alphabet.invert(r)):
                    a = reduce_word(alphabet, g + w + alphabet.invert(g))
                    if a and a not in seen:
                        seen.add(a)
                        atoms.append(a)
        found = {(): True}
        frontier = [()]
        for _ in range(fac_cap):
            nxt = []
            for w in frontier:
                for a in atoms:
                    p = reduce_word(alphabet, w + a)
                    if len(p) <= len_cap and p not in found:
                        found[p] = True
                        nxt.append(p)
            frontier = nxt
        del found[()]
        return sorted(found, key=lambda w: (len(w), w))

    return Enumerator(stage_batch, label="relator closure")


# ---------------------------------------------------------------------------
# shortlex naming


class ShortlexNamer:
    """Canonical shortlex names for the elements of a decidable group.

    Index i names the i-th element in the order of least reduced
    representative words (length first, then the alphabet's symbol
    order).  word and index are mutually inverse on canonical data.
    """

    def __init__(self, alphabet: GenAlphabet, oracle: WordProblemOracle):
        if oracle.kind != "decidable":
            raise ValueError(
                f"shortlex naming needs a decidable word problem, not {oracle.kind!r}")
        self.alphabet = alphabet
        self.oracle = oracle
        self._next = 0
        self._canon: list = []

    def _equal(self, u, v) -> bool:
        w = reduce_word(self.alphabet, tuple(u) + self.alphabet.invert(v))
        return w == () or bool(self.oracle.decider(w))

    def _grow(self) -> None:
        while True:
            w = reduced_word_at(self.alphabet, self._next)
            self._next += 1
            if all(not self._equal(w, c) for c in self._canon):
                self._canon.append(w)
                return

    def word(self, index: int) -> tuple:
        if index < 0:
            raise ValueError(f"name index must be nonnegative, got {index}")
        while len(self._canon) <= index:
            self._grow()
        return self._canon[index]

    def index(self, word) -> int:
        w = reduce_word(self.alphabet, word)
        i = 0
        while True:
            if self._equal(self.word(i), w):
                return i
            i += 1


def shortlex_namer(alphabet: GenAlphabet, oracle: WordProblemOracle) -> ShortlexNamer:
    return ShortlexNamer(alphabet, oracle)


# ---------------------------------------------------------------------------
# pattern codings


@dataclass(frozen=True)
class PatternCoding:
    """Finite partial map from words to symbols, kept unreduced.

    Whether two support words name the same group element is always a
    word-problem question; nothing here reduces or merges them.
    """

    entries: tuple

    def __post_init__(self):
        entries = tuple(sorted(((tuple(w), s) for w, s in self.entries),
                               key=lambda e: (len(e[0]), e[0])))
        words = [w for w, _ in entries]
        if len(set(words)) != len(words):
            raise ValueError(f"duplicate support word among {words}")
        object.__setattr__(self, "entries", entries)

    @property
    def support(self) -> tuple:
        return tuple(w for w, _ in self.entries)

    def symbol(self, word):
        word = tuple(word)
        for w, s in self.entries:
            if w == word:
                return s
        raise ValueError(f"word {word!r} is not in the support")


def coding_inconsistent(coding: PatternCoding, alphabet: GenAlphabet,
                        oracle: WordProblemOracle, fuel: int) -> SemiDecision:
    """Semi-decide that two support words name one element yet differ.

    Decidable and free oracles settle every pair at the first stage, so
    a consistent coding is refuted permanently; an re oracle keeps
    re-checking pairs against the growing relator closure.
    """
    pairs = [(u, v) for (u, su), (v, sv) in itertools.combinations(coding.entries, 2)
             if su != sv]

    def check(t: int):
        permanent = True
        for u, v in pairs:
            w = reduce_word(alphabet, u + alphabet.invert(v))
            if w == ():
                return (u, v)
            if oracle.kind == "free":
                continue
            elif oracle.kind == "decidable":
                if oracle.decider(w):
                    return (u, v)
            else:
                permanent = False
                if w in oracle.closure.emit(t):
                    return (u, v)
        if permanent:
            raise Refuted("all differing support pairs name distinct elements")
        return None

    return StagedQuery(check).query(fuel)


# ---------------------------------------------------------------------------
# subshifts and pullbacks


@dataclass(frozen=True)
class SubshiftSpec:
    """A subshift over a marked group, presented by forbidden codings.

    kind records what the presentation promises: 'sft' carries the full
    finite list in sft_patterns, 'ecp' promises the enumerator is the
    complement enumeration of an effectively closed pattern set, and
    'effective' promises mere enumerability.
    """

    alphabet: tuple
    gens: GenAlphabet
    oracle: WordProblemOracle
    forbidden: Enumerator
    kind: str = "effective"
    sft_patterns: tuple = ()
    tags: tuple = ()

    def __post_init__(self):
        if self.kind not in ("sft", "ecp", "effective"):
            raise ValueError(f"unknown subshift kind {self.kind!r}")
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "sft_patterns", tuple(self.sft_patterns))
        object.__setattr__(self, "tags", tuple(self.tags))
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError(f"alphabet symbols must be distinct, got {self.alphabet}")

    @staticmethod
    def sft(alphabet, gens, oracle, patterns, tags=()) -> "SubshiftSpec":
        pats = tuple(patterns)
        return SubshiftSpec(tuple(alphabet), gens, oracle,
                            Enumerator.fixed(pats, label="sft patterns"),
                            kind="sft", sft_patterns=pats, tags=tuple(tags))


def pullback_fullshift(alphabet: GenAlphabet, oracle: WordProblemOracle,
                       symbols) -> Enumerator:
    """Mismatch codings over identity words: {eps -> x, w -> y != x}.

    These are exactly the patterns that separate the pullback of the
    full shift from the free full shift: a configuration lifts iff it
    avoids them all.  A free oracle yields the empty enumeration.
    """
    symbols = tuple(symbols)

    def stage_batch(t: int):
        out = []
        for w in _identity_words(alphabet, oracle, t):
            for x in symbols:
                for y in symbols:
                    if x != y:
                        out.append(PatternCoding((((), x), (w, y))))
        return out

    return Enumerator(stage_batch, label="full shift pullback mismatches")


def _identity_words(alphabet: GenAlphabet, oracle: WordProblemOracle, t: int) -> list:
    """Nonempty reduced identity words available within one stage."""
    if oracle.kind == "free":
        return []
    if oracle.kind == "re":
        return sorted(oracle.closure.emit(t), key=lambda w: (len(w), w))
    cap = (t.bit_length() + 2) // 3
    return [w for w in reduced_words_upto(alphabet, cap) if w and oracle.decider(w)]


def subshift_pullback(x: SubshiftSpec) -> SubshiftSpec:
    """Pull a subshift back along the marking by the free group.

    Transported forbidden codings keep their support reduced; a coding
    whose support words collide after reduction with clashing symbols
    bounds an empty cylinder and is dropped.  Word-problem mismatch
    codings carve the image of the pullback inside the free full shift.
    """
    mismatches = pullback_fullshift(x.gens, x.oracle, x.alphabet)

    def stage_batch(t: int):
        out = list(mismatches.emit(t))
        for p in x.forbidden.emit(t):
            merged: dict = {}
            consistent = True
            for w, s in p.entries:
                r = reduce_word(x.gens, w)
                if merged.get(r, s) != s:
                    consistent = False
                    break
                merged[r] = s
            if consistent:
                out.append(PatternCoding(tuple(merged.items())))
        return out

    return SubshiftSpec(x.alphabet, x.gens, WordProblemOracle.free(),
                        Enumerator(stage_batch, label="pullback"), kind="ecp")


# ---------------------------------------------------------------------------
# configuration spaces over the free group


def config_space(x: SubshiftSpec) -> CantorSpace:
    """Configurations over the free group on x's generators.

    Coordinate i holds the symbol at the i-th freely reduced word in
    shortlex order.
    """
    return CantorSpace.alphabet(len(x.alphabet),
                                labels=tuple(str(s) for s in x.alphabet))


def configurations_avoiding(x: SubshiftSpec, space: CantorSpace | None = None) -> EffClosedSet:
    """The configurations avoiding every translate of every forbidden coding.

    Stage t shares its translate budget across the codings emitted
    within t, so the region count stays near t per stage while every
    pair (coding, translate) is eventually placed.  A translate whose
    support words collide after reduction with clashing symbols
    constrains nothing and is skipped.
    """
    space = space if space is not None else config_space(x)
    sym_index = {s: i for i, s in enumerate(x.alphabet)}

    def stage_batch(t: int):
        out = []
        pats = sorted(x.forbidden.emit(t), key=lambda p: p.entries)
        translates = max(1, t // len(pats)) if pats else 0
        for p in pats:
            for gi in range(translates):
                g = reduced_word_at(x.gens, gi)
                cells: dict = {}
                consistent = True
                for w, s in p.entries:
                    coord = reduced_rank(x.gens, reduce_word(x.gens, g + tuple(w)))
                    si = sym_index[s]
                    if cells.get(coord, si) != si:
                        consistent = False
                        break
                    cells[coord] = si
                if consistent:
                    out.append(box_make([(c, {v}) for c, v in sorted(cells.items())],
                                        space.sizes))
        return out

    return EffClosedSet(space, Enumerator(stage_batch),
                        name="configurations avoiding forbidden codings")


def cmax_enumerate(x: SubshiftSpec, ambient: RecCompactSet | None = None,
                   support_size: int = 2) -> Enumerator:
    """Codings whose cylinder is certified disjoint from the pullback.

    Stage t sweeps codings supported on the first few reduced words and
    dovetails two certifiers.  A word-problem inconsistency (two support
    words naming one element with different symbols) empties the
    cylinder outright; otherwise the emptiness engine runs against the
    forbidden-pattern complement at a square-root budget, so realizable
    codings cost covering work sublinear in the stage while certified
    ones keep their stamps through the memoized queries.
    """
    if support_size < 1:
        raise ValueError(f"support size must be positive, got {support_size}")
    space = config_space(x)
    avoid = configurations_avoiding(subshift_pullback(x), space)
    amb = ambient if ambient is not None else RecCompactSet.whole(space)
    if amb.space is not space:
        raise ValueError("ambient compact must live on the configuration space")
    cylinders: dict = {}

    def cylinder_closed(coding: PatternCoding) -> EffClosedSet:
        c = cylinders.get(coding)
        if c is None:
            sym_index = {s: i for i, s in enumerate(x.alphabet)}
            items = []
            for w, s in coding.entries:
                coord = reduced_rank(x.gens, tuple(w))
                others = set(range(len(x.alphabet))) - {sym_index[s]}
                items.append(box_make([(coord, others)], space.sizes))
            c = EffClosedSet.from_complement_items(space, tuple(items)).intersect(
                avoid, name=f"cylinder {coding.entries!r} inside pullback")
            cylinders[coding] = c
        return c

    def stage_batch(t: int):
        big = t.bit_length()
        wcap = min(2 + big, 20)
        budget = 1 << (big // 2)
        words = [reduced_word_at(x.gens, i) for i in range(wcap)]
        supports = itertools.chain.from_iterable(
            itertools.combinations(words, n) for n in range(1, support_size + 1))
        # a cylinder's own complement boxes never cover the space, so the
        # engine only gets called once the avoidance enum has material
        engine_live = bool(avoid.complement_enum.emit(budget))
        out = []
        for support in supports:
            for labels in itertools.product(x.alphabet, repeat=len(support)):
                coding = PatternCoding(tuple(zip(support, labels)))
                if coding_inconsistent(coding, x.gens, x.oracle, t):
                    out.append(coding)
                elif engine_live and semi_decide_empty(
                        cylinder_closed(coding), amb, budget):
                    out.append(coding)
        return out

    return Enumerator(stage_batch, label="maximal excluded codings")


# ---------------------------------------------------------------------------
# builtin marked groups


def _exp_sum(word, pos: str, neg: str) -> int:
    return sum(1 if x == pos else (-1 if x == neg else 0) for x in word)


def _lamplighter_identity(word) -> bool:
    pos = 0
    lamps: set = set()
    for x in word:
        if x in ("a", "A"):
            lamps.symmetric_difference_update({pos})
        else:
            pos += 1 if x == "t" else -1
    return pos == 0 and not lamps


def _lamplighter_commutator(k: int) -> tuple:
    return (("t",) * k + ("a",) + ("T",) * k + ("a",)
            + ("t",) * k + ("A",) + ("T",) * k + ("A",))


def builtin_group(name: str) -> tuple:
    """A named (GenAlphabet, WordProblemOracle) pair.

    Z, Z2 and lamplighter carry exact deciders; F2 is free; Z2_re and
    lamplighter_re present the same groups through relator closures
    (commutator, resp. a^2 with the commutator family [t^k a t^-k, a]).
    """
    if name == "Z":
        g = GenAlphabet((("a", "A"),))
        return g, WordProblemOracle.decidable(lambda w: _exp_sum(w, "a", "A") == 0)
    if name == "Z2":
        g = GenAlphabet((("a", "A"), ("b", "B")))
        return g, WordProblemOracle.decidable(
            lambda w: _exp_sum(w, "a", "A") == 0 and _exp_sum(w, "b", "B") == 0)
    if name == "F2":
        return GenAlphabet((("a", "A"), ("b", "B"))), WordProblemOracle.free()
    if name == "Z2_re":
        g = GenAlphabet((("a", "A"), ("b", "B")))
        closure = relator_closure(g, [("a", "b", "A", "B")])
        return g, WordProblemOracle.recursively_enumerable(closure)
    if name == "lamplighter":
        g = GenAlphabet((("a", "A"), ("t", "T")))
        return g, WordProblemOracle.decidable(_lamplighter_identity)
    if name == "lamplighter_re":
        g = GenAlphabet((("a", "A"), ("t", "T")))
        closure = relator_closure(g, [("a", "a")], [_lamplighter_commutator])
        return g, WordProblemOracle.recursively_enumerable(closure)
    raise ValueError(f"unknown builtin group {name!r}")
