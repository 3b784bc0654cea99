"""Self-referential sentence systems over a ``Trans`` predicate.

Sentences are named; ``Trans(n)`` and ``Ref(n)`` both point at a name, so the
diagonal sentence is just a definition that mentions itself.  Three-valued
values use the strong Kleene tables, with truth order ``F < N < T``.
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .errors import CapacityError, DomainError, FuelError, ParseError

CLASSICAL_SEARCH_BOUND = 20
LP_BOUND = 12


class ThreeVal(enum.IntEnum):
    F = 0
    N = 1
    T = 2

    @classmethod
    def of(cls, b: bool) -> "ThreeVal":
        return cls.T if b else cls.F

    @property
    def definite(self) -> bool:
        return self is not ThreeVal.N

    def info_le(self, other: "ThreeVal") -> bool:
        """Information order: N below both T and F, which are incomparable."""
        return self is ThreeVal.N or self is other


class Grounding(str, enum.Enum):
    GROUNDED_TRUE = "GroundedTrue"
    GROUNDED_FALSE = "GroundedFalse"
    UNGROUNDED = "Ungrounded"


@dataclass(frozen=True)
class Atom:
    name: str
    value: bool


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Trans:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Sentence"


@dataclass(frozen=True)
class And:
    left: "Sentence"
    right: "Sentence"


@dataclass(frozen=True)
class Or:
    left: "Sentence"
    right: "Sentence"


@dataclass(frozen=True)
class Implies:
    left: "Sentence"
    right: "Sentence"


@dataclass(frozen=True)
class Iff:
    left: "Sentence"
    right: "Sentence"


Sentence = Union[Atom, Ref, Trans, Not, And, Or, Implies, Iff]
_BINARY = {"and": And, "or": Or, "implies": Implies, "iff": Iff}


def referenced_names(phi: Sentence) -> set[str]:
    if isinstance(phi, (Ref, Trans)):
        return {phi.name}
    if isinstance(phi, Atom):
        return set()
    if isinstance(phi, Not):
        return referenced_names(phi.arg)
    return referenced_names(phi.left) | referenced_names(phi.right)


def to_text(phi: Sentence) -> str:
    if isinstance(phi, Atom):
        return f"atom({phi.name},{'true' if phi.value else 'false'})"
    if isinstance(phi, Ref):
        return f"ref({phi.name})"
    if isinstance(phi, Trans):
        return f"trans({phi.name})"
    if isinstance(phi, Not):
        return f"not({to_text(phi.arg)})"
    op = {And: "and", Or: "or", Implies: "implies", Iff: "iff"}[type(phi)]
    return f"{op}({to_text(phi.left)},{to_text(phi.right)})"


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[^\W\d][\w'.\-]*)|(?P<punct>[(),]))", re.UNICODE)


def _tokenize(text: str):
    pos = 0
    line, col0 = 1, 0
    tokens = []
    while pos < len(text):
        if text[pos].isspace():
            if text[pos] == "\n":
                line += 1
                col0 = pos + 1
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        start = m.start("name") if m.group("name") else m.start("punct")
        tokens.append((m.group("name") or m.group("punct"), line, start - col0 + 1))
        pos = m.end()
    tokens.append(("<end>", line, pos - col0 + 1))
    return tokens


class _SentenceParser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, expected=None):
        tok = self.tokens[self.i]
        if expected is not None and tok[0] != expected:
            raise ParseError(f"expected {expected!r}, found {tok[0]!r}", tok[1], tok[2])
        self.i += 1
        return tok

    def name(self):
        tok = self.take()
        if tok[0] in ("(", ")", ",", "<end>"):
            raise ParseError(f"expected a sentence name, found {tok[0]!r}", tok[1], tok[2])
        return tok[0]

    def expr(self) -> Sentence:
        word, line, col = self.take()
        if word == "not":
            self.take("(")
            arg = self.expr()
            self.take(")")
            return Not(arg)
        if word in _BINARY:
            self.take("(")
            args = [self.expr()]
            while self.peek()[0] == ",":
                self.take(",")
                args.append(self.expr())
            close = self.take(")")
            if len(args) < 2 or (word in ("implies", "iff") and len(args) != 2):
                raise ParseError(f"{word} takes {'two' if word in ('implies', 'iff') else 'at least two'} arguments",
                                 close[1], close[2])
            out = args[0]
            for a in args[1:]:
                out = _BINARY[word](out, a)
            return out
        if word in ("trans", "ref"):
            self.take("(")
            n = self.name()
            self.take(")")
            return Trans(n) if word == "trans" else Ref(n)
        if word == "atom":
            self.take("(")
            n = self.name()
            self.take(",")
            v = self.take()
            if v[0] not in ("true", "false"):
                raise ParseError(f"atom value must be true or false, found {v[0]!r}", v[1], v[2])
            self.take(")")
            return Atom(n, v[0] == "true")
        raise ParseError(f"unexpected {word!r}", line, col)


def parse_sentence(text: str) -> Sentence:
    p = _SentenceParser(text)
    phi = p.expr()
    end = p.peek()
    if end[0] != "<end>":
        raise ParseError(f"trailing input {end[0]!r}", end[1], end[2])
    return phi


# -- systems ---------------------------------------------------------------

@dataclass(frozen=True)
class SentenceSystem:
    definitions: Mapping[str, Sentence] = field(default_factory=dict)
    ground: Mapping[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        defs = {str(k): v for k, v in dict(self.definitions).items()}
        ground = {str(k): bool(v) for k, v in dict(self.ground).items()}
        both = set(defs) & set(ground)
        if both:
            raise DomainError(f"names both ground and defined: {sorted(both)}")
        known = set(defs) | set(ground)
        for name, phi in defs.items():
            missing = referenced_names(phi) - known
            if missing:
                raise DomainError(f"definition of {name!r} refers to unknown names {sorted(missing)}")
        object.__setattr__(self, "definitions", defs)
        object.__setattr__(self, "ground", ground)

    @classmethod
    def parse(cls, definitions: Mapping[str, str], ground: Mapping[str, bool] | None = None):
        return cls({k: parse_sentence(v) for k, v in definitions.items()}, ground or {})

    @property
    def names(self) -> list[str]:
        return sorted(set(self.definitions) | set(self.ground))

    @property
    def defined(self) -> list[str]:
        return sorted(self.definitions)

    def merge(self, other: "SentenceSystem") -> "SentenceSystem":
        return SentenceSystem({**self.definitions, **other.definitions}, {**self.ground, **other.ground})


def make_transparency_liar(name: str = "L") -> SentenceSystem:
    """The one-sentence system ``name := not(trans(name))``."""
    return SentenceSystem({name: Not(Trans(name))})


# -- strong Kleene ---------------------------------------------------------

def kleene_eval(phi: Sentence, v: Mapping[str, ThreeVal]) -> ThreeVal:
    if isinstance(phi, Atom):
        return ThreeVal.of(phi.value)
    if isinstance(phi, (Ref, Trans)):
        # Trans reads the valuation of its argument: T->T, F->F, N->N.
        try:
            return ThreeVal(v[phi.name])
        except KeyError:
            raise DomainError(f"unresolved name {phi.name!r}") from None
    if isinstance(phi, Not):
        return ThreeVal(2 - kleene_eval(phi.arg, v))
    a = kleene_eval(phi.left, v)
    b = kleene_eval(phi.right, v)
    if isinstance(phi, And):
        return min(a, b)
    if isinstance(phi, Or):
        return max(a, b)
    if isinstance(phi, Implies):
        return max(ThreeVal(2 - a), b)
    if isinstance(phi, Iff):
        return min(max(ThreeVal(2 - a), b), max(ThreeVal(2 - b), a))
    raise DomainError(f"not a sentence: {phi!r}")


def jump(sys: SentenceSystem, v: Mapping[str, ThreeVal]) -> dict[str, ThreeVal]:
    """One revision stage: re-evaluate every definition under ``v``."""
    out = {n: ThreeVal.of(b) for n, b in sys.ground.items()}
    for name, phi in sys.definitions.items():
        out[name] = kleene_eval(phi, v)
    return out


def bottom_valuation(sys: SentenceSystem) -> dict[str, ThreeVal]:
    v = {n: ThreeVal.N for n in sys.definitions}
    v.update({n: ThreeVal.of(b) for n, b in sys.ground.items()})
    return v


def valuation_le(u: Mapping[str, ThreeVal], v: Mapping[str, ThreeVal]) -> bool:
    return all(ThreeVal(u[n]).info_le(ThreeVal(v[n])) for n in u)


@dataclass(frozen=True)
class KripkeResult:
    valuation: dict
    stages: tuple

    def trans_extension(self, reading: str = "kleene") -> dict[str, ThreeVal]:
        return trans_extension(self.valuation, reading)


def trans_extension(valuation: Mapping[str, ThreeVal], reading: str = "kleene") -> dict[str, ThreeVal]:
    """Value of ``Trans(n)`` for every name at a valuation.

    ``"kleene"`` (the default, and what the jump itself uses) passes N
    through.  ``"closed"`` reports ``Trans(n)`` false unless ``n`` is true,
    i.e. the predicate's anti-extension absorbs the ungrounded names; this
    reading is only an output view and never feeds back into iteration.
    """
    if reading == "kleene":
        return {n: ThreeVal(x) for n, x in valuation.items()}
    if reading == "closed":
        return {n: ThreeVal.T if x == ThreeVal.T else ThreeVal.F for n, x in valuation.items()}
    raise DomainError(f"unknown Trans reading {reading!r}")


def kripke_lfp(sys: SentenceSystem, fuel: Optional[int] = None) -> KripkeResult:
    """Least fixed point of the jump, starting from all-N.

    Finite systems stabilise within ``len(definitions) + 1`` stages since
    each non-final stage settles at least one more name; the default fuel
    is the looser ``2 * |names| + 1``.
    """
    if fuel is None:
        fuel = 2 * len(sys.names) + 1
    if fuel < 1:
        raise DomainError("fuel must be at least 1")
    v = bottom_valuation(sys)
    stages = [v]
    for _ in range(fuel):
        w = jump(sys, v)
        if w == v:
            return KripkeResult(v, tuple(stages))
        # strong Kleene is monotone, so the chain from all-N only gains information
        assert valuation_le(v, w), "jump demoted a settled sentence"
        stages.append(w)
        v = w
    raise FuelError(f"Kripke iteration did not stabilise within {fuel} stages")


def classify(sys: SentenceSystem) -> dict[str, Grounding]:
    v = kripke_lfp(sys).valuation
    table = {ThreeVal.T: Grounding.GROUNDED_TRUE, ThreeVal.F: Grounding.GROUNDED_FALSE,
             ThreeVal.N: Grounding.UNGROUNDED}
    return {n: table[v[n]] for n in sys.names}


# -- classical / LP search -------------------------------------------------

def _search(sys: SentenceSystem, order: list[str], fixed: dict[str, ThreeVal]):
    """Yield assignments to ``order`` (F before T, first name most significant)
    under which every definition evaluates to its own name's value.

    Each definition is checked as soon as every name it mentions is fixed,
    so the depth-first walk prunes early while still visiting candidates in
    lexicographic order.
    """
    position = {n: k for k, n in enumerate(order)}
    checks: dict[int, list[str]] = {}
    for name, phi in sys.definitions.items():
        deps = referenced_names(phi) | {name}
        last = max((position[d] for d in deps if d in position), default=-1)
        checks.setdefault(last, []).append(name)
    assignment = dict(fixed)

    def ok(level):
        for name in checks.get(level, ()):
            if kleene_eval(sys.definitions[name], assignment) != assignment[name]:
                return False
        return True

    if not ok(-1):
        return

    def walk(level):
        if level == len(order):
            yield dict(assignment)
            return
        for val in (ThreeVal.F, ThreeVal.T):
            assignment[order[level]] = val
            if ok(level):
                yield from walk(level + 1)
        del assignment[order[level]]

    yield from walk(0)


def total_classical_search(sys: SentenceSystem, bound: int = CLASSICAL_SEARCH_BOUND) -> Optional[dict[str, bool]]:
    """First two-valued assignment with a sound and total ``Trans``.

    Requiring ``Trans(n)`` to agree with ``n`` everywhere makes ``Trans``
    and ``Ref`` coincide, so a witness is a classical solution of every
    definition ``n <-> phi_n``.  Candidates are scanned with names sorted,
    false before true; ``None`` means no such assignment exists.
    """
    n = len(sys.names)
    if n > bound:
        raise CapacityError(f"{n} names exceed the classical search bound {bound}")
    fixed = {k: ThreeVal.of(b) for k, b in sys.ground.items()}
    for sol in _search(sys, sys.defined, fixed):
        return {k: val == ThreeVal.T for k, val in sorted(sol.items())}
    return None


@dataclass(frozen=True)
class LPValuation:
    designated_true: frozenset
    designated_false: frozenset

    @property
    def gluts(self) -> frozenset:
        return self.designated_true & self.designated_false


def lp_model(sys: SentenceSystem, bound: int = LP_BOUND) -> tuple[LPValuation, Optional[str]]:
    """A glut-minimal LP model of the system with ``Trans(n) == n``.

    Values are read in LP: the middle value means *both*.  Grounded names
    keep their Kripke values; for the ungrounded ones, glut sets are tried
    by increasing size (then lexicographically) and the rest get the first
    classical completion, so a paradox-free system ends up with exactly the
    ``total_classical_search`` witness.  The returned witness is a non-glut
    name, preferring one that is only false: either it or its negation is
    undesignated, so the model does not designate everything.
    """
    names = sys.names
    if len(names) > bound:
        raise CapacityError(f"{len(names)} names exceed the LP bound {bound}")
    base = kripke_lfp(sys).valuation
    grounded = {k: x for k, x in base.items() if x.definite}
    open_names = [k for k in sys.defined if not base[k].definite]
    chosen = None
    for size in range(len(open_names) + 1):
        for gluts in itertools.combinations(open_names, size):
            fixed = dict(grounded)
            fixed.update({g: ThreeVal.N for g in gluts})
            rest = [k for k in open_names if k not in gluts]
            chosen = next(_search(sys, rest, fixed), None)
            if chosen is not None:
                break
        if chosen is not None:
            break
    assert chosen is not None, "the Kripke fixed point read in LP is always a model"
    dtrue = frozenset(k for k, x in chosen.items() if x != ThreeVal.F)
    dfalse = frozenset(k for k, x in chosen.items() if x != ThreeVal.T)
    only_false = [k for k in names if k in dfalse and k not in dtrue]
    only_true = [k for k in names if k in dtrue and k not in dfalse]
    witness = (only_false or only_true or [None])[0]
    return LPValuation(dtrue, dfalse), witness


def lp_satisfies(sys: SentenceSystem, val: LPValuation) -> bool:
    """Every definition and every Trans biconditional is designated in LP."""
    v = {}
    for k in sys.names:
        t, f = k in val.designated_true, k in val.designated_false
        v[k] = ThreeVal.N if (t and f) else ThreeVal.T if t else ThreeVal.F
    for name, phi in sys.definitions.items():
        if kleene_eval(Iff(Ref(name), phi), v) == ThreeVal.F:
            return False
    return all(kleene_eval(Iff(Trans(k), Ref(k)), v) != ThreeVal.F for k in sys.names)
