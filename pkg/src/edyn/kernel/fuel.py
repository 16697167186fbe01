"""Fuel-bounded semi-decision calculus.

Every semi-decidable question in the package is reified as a total
function of an explicit fuel bound.  A query either accepts, reporting
the fuel at which it first accepted, or reports Undetermined, which
never means "no": it means "not within this much fuel".

Dovetailing is deterministic.  A fuel budget f unlocks the stages
1, 2, 4, ..., 2^k with 2^k <= f; stage t runs whatever inner work the
operation prescribes with inner budget t.  Acceptance at stage t is
recorded as acceptance at fuel t, so results are monotone: anything
accepted within fuel f is accepted, with the same stamp, within any
f' >= f.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def stages(fuel: int) -> list[int]:
    """The dovetailing stages unlocked by a fuel budget: powers of two up to fuel."""
    if fuel < 1:
        return []
    out = []
    t = 1
    while t <= fuel:
        out.append(t)
        t *= 2
    return out


class NeedsMoreFuel(RuntimeError):
    """A construction that has to deliver a finished object could not
    certify one within its fuel.  Unlike an Undetermined semi-decision,
    this is raised where there is no partial answer worth returning."""


@dataclass(frozen=True)
class SemiDecision:
    """Outcome of a fuel-bounded semi-decidable query.

    accepted is True only when the query certifiably holds; at_fuel is
    then the stage at which the certificate appeared.  witness carries
    certificate payload (typically ball indices or regions).
    """

    accepted: bool
    at_fuel: int | None = None
    witness: tuple = ()

    @staticmethod
    def accept(at_fuel: int, witness: tuple = ()) -> "SemiDecision":
        return SemiDecision(True, at_fuel, witness)

    @staticmethod
    def undetermined() -> "SemiDecision":
        return SemiDecision(False, None, ())

    def __bool__(self) -> bool:
        return self.accepted


class StagedQuery:
    """Memoized semi-decision driven by a per-stage check.

    check(t) -> witness tuple or None.  The first accepting stage is
    cached, as is the largest stage known to fail, so repeated queries
    at growing fuel never redo work.  A check may also raise
    Refuted to record that no stage will ever accept (used by exact
    refutation shortcuts); the query then stays Undetermined at every
    fuel without burning further budget.
    """

    def __init__(self, check):
        self._check = check
        self._accepted_at: int | None = None
        self._witness: tuple = ()
        self._failed_up_to = 0
        self._refuted = False

    def query(self, fuel: int) -> SemiDecision:
        if self._accepted_at is not None and self._accepted_at <= fuel:
            return SemiDecision.accept(self._accepted_at, self._witness)
        if self._refuted:
            return SemiDecision.undetermined()
        for t in stages(fuel):
            if t <= self._failed_up_to:
                continue
            if self._accepted_at is not None:
                break
            try:
                w = self._check(t)
            except Refuted:
                self._refuted = True
                return SemiDecision.undetermined()
            if w is not None:
                self._accepted_at = t
                self._witness = tuple(w)
                return SemiDecision.accept(t, self._witness)
            self._failed_up_to = t
        if self._accepted_at is not None and self._accepted_at <= fuel:
            return SemiDecision.accept(self._accepted_at, self._witness)
        return SemiDecision.undetermined()


class Refuted(Exception):
    """Raised by a stage check that has proved the query can never accept."""


class Enumerator:
    """Fuel-monotone enumerator of a set of items.

    emit(fuel) returns the finite set of items produced within the
    budget; it is the union of per-stage batches stage_fn(t) over the
    stages unlocked by the fuel, so emit(f) is a subset of emit(f') for
    f <= f'.  Batches are memoized per stage.
    """

    def __init__(self, stage_fn, label: str = ""):
        self._stage_fn = stage_fn
        self._cache: dict[int, frozenset] = {}
        self.label = label

    def emit(self, fuel: int) -> frozenset:
        out: set = set()
        for t in stages(fuel):
            if t not in self._cache:
                self._cache[t] = frozenset(self._stage_fn(t))
            out |= self._cache[t]
        return frozenset(out)

    @staticmethod
    def fixed(items, label: str = "") -> "Enumerator":
        """Enumerator of a finite set, fully emitted at every positive fuel."""
        frozen = frozenset(items)
        return Enumerator(lambda t: frozen, label=label)

    @staticmethod
    def union(parts, label: str = "") -> "Enumerator":
        parts = list(parts)
        return Enumerator(lambda t: frozenset().union(*(p.emit(t) for p in parts)) if parts else frozenset(),
                          label=label)

    def map(self, fn, label: str = "") -> "Enumerator":
        return Enumerator(lambda t: frozenset(fn(x) for x in self.emit(t)), label=label)
