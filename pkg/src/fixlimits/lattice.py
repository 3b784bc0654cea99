"""Powerset lattices, rule/table operators and Kleene iteration.

States are ``frozenset``s of item names at the API boundary; internally each
universe fixes a bit position per item and operators work on ``int`` masks,
which keeps the exhaustive 2^n scans cheap.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import CapacityError, DomainError, MonotonicityError

ENUMERATION_BOUND = 16
ORACLE_BOUND = 12


@dataclass(frozen=True)
class Universe:
    items: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        items = tuple(str(i) for i in self.items)
        if len(set(items)) != len(items):
            raise DomainError(f"duplicate item identifiers in universe {items}")
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "_index", {name: k for k, name in enumerate(items)})

    @property
    def size(self) -> int:
        return len(self.items)

    @property
    def top_mask(self) -> int:
        return (1 << len(self.items)) - 1

    def __contains__(self, item) -> bool:
        return item in self._index

    def index(self, item: str) -> int:
        try:
            return self._index[item]
        except KeyError:
            raise DomainError(f"item {item!r} is not in the universe") from None

    def mask(self, members: Iterable[str]) -> int:
        if isinstance(members, str):
            raise DomainError("a lattice element is a collection of items, not a string")
        m = 0
        for item in members:
            m |= 1 << self.index(item)
        return m

    def members(self, mask: int) -> frozenset[str]:
        return frozenset(self.items[k] for k in range(len(self.items)) if mask >> k & 1)

    def sorted_members(self, mask: int) -> list[str]:
        """Members in canonical universe order (for reports)."""
        return [self.items[k] for k in range(len(self.items)) if mask >> k & 1]

    def element(self, members: Iterable[str]) -> frozenset[str]:
        return self.members(self.mask(members))

    @property
    def top(self) -> frozenset[str]:
        return frozenset(self.items)


Rule = tuple[frozenset, frozenset]


@dataclass(frozen=True)
class Operator:
    """A transparency policy on the powerset of ``universe``.

    ``T(x) = (x if inflationary else {}) | fired(x) | table.get(x, {})`` where
    ``fired(x)`` is the union of conclusions of every rule whose premise is
    contained in ``x``.  Rule-only operators are monotone by construction;
    table entries are arbitrary and must be checked with ``check_monotone``.
    Table states that are not listed contribute nothing.
    """

    universe: Universe
    rules: tuple[Rule, ...] = ()
    inflationary: bool = True
    table: Mapping[frozenset, frozenset] | None = None
    _rule_masks: tuple = field(init=False, repr=False, compare=False)
    _table_masks: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        u = self.universe
        rules = tuple((frozenset(p), frozenset(c)) for p, c in self.rules)
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "_rule_masks", tuple((u.mask(p), u.mask(c)) for p, c in rules))
        tmasks = {}
        if self.table is not None:
            table = {frozenset(k): frozenset(v) for k, v in dict(self.table).items()}
            object.__setattr__(self, "table", table)
            tmasks = {u.mask(k): u.mask(v) for k, v in table.items()}
        object.__setattr__(self, "_table_masks", tmasks)

    @classmethod
    def from_rules(cls, items, rules, inflationary=True) -> "Operator":
        return cls(Universe(tuple(items)), tuple(rules), inflationary)

    @classmethod
    def from_table(cls, items, table, inflationary=False) -> "Operator":
        return cls(Universe(tuple(items)), (), inflationary, table)

    @property
    def rule_based(self) -> bool:
        return not self._table_masks

    def step(self, mask: int) -> int:
        out = mask if self.inflationary else 0
        for prem, concl in self._rule_masks:
            if prem & mask == prem:
                out |= concl
        if self._table_masks:
            out |= self._table_masks.get(mask, 0)
        return out

    def __call__(self, x: Iterable[str]) -> frozenset[str]:
        return self.universe.members(self.step(self.universe.mask(x)))


def apply(op: Operator, x: Iterable[str]) -> frozenset[str]:
    return op(x)


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    FUEL_EXHAUSTED = "FuelExhausted"


@dataclass(frozen=True)
class FixpointResult:
    value: frozenset
    trace: tuple[frozenset, ...]
    status: Status
    steps: int

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def _iterate(op: Operator, start: int, fuel: int, ascending: bool) -> tuple[int, list[int], Status, int]:
    if fuel < 1:
        raise DomainError("fuel must be at least 1")
    x = start
    chain = [x]
    for step in range(1, fuel + 1):
        y = op.step(x)
        if y == x:
            return x, chain, Status.CONVERGED, step
        if ascending and x & ~y:
            raise MonotonicityError(
                f"iterate {step} drops {sorted(op.universe.members(x & ~y))}; operator is not monotone"
            )
        if not ascending and y & ~x:
            raise MonotonicityError(
                f"iterate {step} adds {sorted(op.universe.members(y & ~x))}; operator is not monotone"
            )
        chain.append(y)
        x = y
    return x, chain, Status.FUEL_EXHAUSTED, fuel


def _result(op, x, chain, status, steps) -> FixpointResult:
    members = op.universe.members
    return FixpointResult(members(x), tuple(members(c) for c in chain), status, steps)


def lfp(op: Operator, fuel: int = 1000) -> FixpointResult:
    """Iterate ``op`` upward from the empty state.

    ``trace`` holds the distinct iterates (the repeated final one is not
    duplicated) and ``steps`` counts operator applications, so a converged
    run has ``steps == len(trace)``.
    """
    return _result(op, *_iterate(op, 0, fuel, ascending=True))


def gfp(op: Operator, fuel: int = 1000) -> FixpointResult:
    """Iterate ``op`` downward from the full state."""
    return _result(op, *_iterate(op, op.universe.top_mask, fuel, ascending=False))


def lfp_mask(op: Operator, fuel: int = 1000) -> int:
    x, _, status, _ = _iterate(op, 0, fuel, ascending=True)
    if status is not Status.CONVERGED:
        raise MonotonicityError("least fixed point did not converge within fuel")
    return x


def check_monotone(
    op: Operator, samples: int = 10_000, seed: int = 0, exhaustive_bound: int = ENUMERATION_BOUND
) -> list[tuple[frozenset, frozenset]]:
    """Return witnesses ``(x, y)`` with ``x <= y`` but ``T(x) not <= T(y)``.

    Up to ``exhaustive_bound`` items every covering pair ``(x, x | {i})`` is
    scanned; that is complete, because a violation on any comparable pair
    shows up on some covering step of a chain between them.  Larger
    universes are sampled with ``random.Random(seed)``.
    """
    u = op.universe
    n = u.size
    found = []
    if n <= exhaustive_bound:
        for x in range(1 << n):
            tx = op.step(x)
            for k in range(n):
                bit = 1 << k
                if x & bit:
                    continue
                if tx & ~op.step(x | bit):
                    found.append((x, x | bit))
    else:
        rng = random.Random(seed)
        for _ in range(samples):
            y = rng.getrandbits(n)
            x = y & rng.getrandbits(n)
            if op.step(x) & ~op.step(y):
                found.append((x, y))
    return [(u.members(x), u.members(y)) for x, y in found]


def _check_bound(n: int, bound: int):
    if n > bound:
        raise CapacityError(f"universe of {n} items exceeds the enumeration bound {bound}")


def fixpoint_masks(op: Operator, bound: int = ENUMERATION_BOUND) -> list[int]:
    _check_bound(op.universe.size, bound)
    return [x for x in range(1 << op.universe.size) if op.step(x) == x]


def enumerate_fixpoints(op: Operator, bound: int = ENUMERATION_BOUND) -> set[frozenset]:
    return {op.universe.members(x) for x in fixpoint_masks(op, bound)}


def post_fixed_masks(op: Operator, bound: int = ENUMERATION_BOUND) -> list[int]:
    """States with ``T(x) <= x``."""
    _check_bound(op.universe.size, bound)
    return [x for x in range(1 << op.universe.size) if op.step(x) & ~x == 0]


def successor_chain(n: int) -> Operator:
    """Seed item ``s0`` plus rules ``s{i} -> s{i+1}``: chain height ``n``.

    With fuel below ``n`` the upward iteration cannot finish, which is the
    finite stand-in for a policy whose least fixed point needs a transfinite
    number of rounds.
    """
    items = tuple(f"s{i}" for i in range(n))
    rules = [((), ("s0",))] + [((items[i],), (items[i + 1],)) for i in range(n - 1)]
    return Operator.from_rules(items, rules)
