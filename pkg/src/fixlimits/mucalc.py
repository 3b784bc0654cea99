"""Modal mu-calculus: parser, positivity check, model checking, naive oracle.

Concrete syntax (loosest binding first)::

    mu X. phi    nu X. phi          binders extend as far right as possible
    phi -> psi                      right associative
    phi | psi
    phi & psi
    !phi   []phi   <>phi            prefix
    p  X  true  false  (phi)

Identifiers starting with an upper-case letter are fixpoint variables and
must be bound; everything else is a proposition.  With ``binders=False``
(the GL fragment) binders are rejected and every identifier is a
proposition.
"""
from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

from .errors import CapacityError, DomainError, ParseError, PositivityError

NAIVE_BOUND = 6


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Prop:
    name: str
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Var:
    name: str
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Top:
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Bottom:
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Not:
    arg: "Formula"
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Box:
    arg: "Formula"
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Diamond:
    arg: "Formula"
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Mu:
    var: str
    body: "Formula"
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Nu:
    var: str
    body: "Formula"
    pos: Optional[tuple] = _pos()


Formula = Union[Prop, Var, Top, Bottom, Not, And, Or, Implies, Box, Diamond, Mu, Nu]


def to_text(phi: Formula) -> str:
    """Fully parenthesised concrete syntax that ``parse_mu`` reads back."""
    if isinstance(phi, (Prop, Var)):
        return phi.name
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, Not):
        return f"!{to_text(phi.arg)}"
    if isinstance(phi, Box):
        return f"[]{to_text(phi.arg)}"
    if isinstance(phi, Diamond):
        return f"<>{to_text(phi.arg)}"
    if isinstance(phi, (Mu, Nu)):
        kw = "mu" if isinstance(phi, Mu) else "nu"
        return f"({kw} {phi.var}. {to_text(phi.body)})"
    sym = {And: "&", Or: "|", Implies: "->"}[type(phi)]
    return f"({to_text(phi.left)} {sym} {to_text(phi.right)})"


def depth(phi: Formula) -> int:
    if isinstance(phi, (Prop, Var, Top, Bottom)):
        return 0
    if isinstance(phi, (Not, Box, Diamond)):
        return 1 + depth(phi.arg)
    if isinstance(phi, (Mu, Nu)):
        return 1 + depth(phi.body)
    return 1 + max(depth(phi.left), depth(phi.right))


def propositions(phi: Formula) -> set[str]:
    if isinstance(phi, Prop):
        return {phi.name}
    if isinstance(phi, (Var, Top, Bottom)):
        return set()
    if isinstance(phi, (Not, Box, Diamond)):
        return propositions(phi.arg)
    if isinstance(phi, (Mu, Nu)):
        return propositions(phi.body)
    return propositions(phi.left) | propositions(phi.right)


# -- parsing ---------------------------------------------------------------

_LEX = re.compile(r"(?P<ws>\s+)|(?P<id>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>\[\]|<>|->|[&|!().])")
_KEYWORDS = {"mu", "nu", "true", "false"}


class UnboundVariableError(ParseError):
    pass


def _lex(text: str):
    tokens = []
    pos, line, col0 = 0, 1, 0
    while pos < len(text):
        m = _LEX.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        if m.group("ws"):
            for k, ch in enumerate(m.group("ws")):
                if ch == "\n":
                    line += 1
                    col0 = pos + k + 1
        else:
            kind = "id" if m.group("id") else "op"
            tokens.append((kind, m.group(kind), (line, pos - col0 + 1)))
        pos = m.end()
    tokens.append(("end", "<end>", (line, pos - col0 + 1)))
    return tokens


class _Parser:
    def __init__(self, text, binders):
        self.toks = _lex(text)
        self.i = 0
        self.binders = binders
        self.bound: list[str] = []

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1]!r}", *tok[2])
        self.i += 1
        return tok

    def formula(self):
        left = self.disj()
        if self.peek()[1] == "->":
            tok = self.take()
            return Implies(left, self.formula(), pos=tok[2])
        return left

    def disj(self):
        left = self.conj()
        while self.peek()[1] == "|":
            tok = self.take()
            left = Or(left, self.conj(), pos=tok[2])
        return left

    def conj(self):
        left = self.unary()
        while self.peek()[1] == "&":
            tok = self.take()
            left = And(left, self.unary(), pos=tok[2])
        return left

    def unary(self):
        kind, val, pos = self.peek()
        if val == "!":
            self.take()
            return Not(self.unary(), pos=pos)
        if val == "[]":
            self.take()
            return Box(self.unary(), pos=pos)
        if val == "<>":
            self.take()
            return Diamond(self.unary(), pos=pos)
        if val in ("mu", "nu"):
            if not self.binders:
                raise ParseError(f"fixpoint binder {val!r} not allowed here", *pos)
            self.take()
            vkind, var, vpos = self.take()
            if vkind != "id" or var in _KEYWORDS or not var[0].isupper():
                raise ParseError(f"binder needs an upper-case variable, found {var!r}", *vpos)
            self.take(".")
            self.bound.append(var)
            body = self.formula()
            self.bound.pop()
            return (Mu if val == "mu" else Nu)(var, body, pos=pos)
        if val == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        if kind == "id":
            self.take()
            if val == "true":
                return Top(pos=pos)
            if val == "false":
                return Bottom(pos=pos)
            if self.binders and val[0].isupper():
                if val not in self.bound:
                    raise UnboundVariableError(f"unbound variable {val!r}", *pos)
                return Var(val, pos=pos)
            return Prop(val, pos=pos)
        raise ParseError(f"unexpected {val!r}", *pos)


def parse_raw(text: str, binders: bool = True) -> Formula:
    """Parse without positivity checking or normalisation."""
    p = _Parser(text, binders)
    phi = p.formula()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", *pos)
    return phi


def parse_mu(text: str) -> Formula:
    """Parse, reject non-positive binders, and return negation normal form."""
    phi = parse_raw(text)
    bad = check_positivity(phi)
    if bad:
        raise PositivityError(bad)
    return to_nnf(phi)


# -- positivity and NNF ----------------------------------------------------

@dataclass(frozen=True)
class Violation:
    variable: str
    path: str


def check_positivity(phi: Formula) -> list[Violation]:
    """Every bound variable must sit under an even number of negations
    (counting the left side of ``->``) relative to its binder."""
    out: list[Violation] = []

    def walk(node, parity: dict, path: tuple):
        here = path + (type(node).__name__,)
        if isinstance(node, Var):
            if parity.get(node.name, 0):
                out.append(Violation(node.name, "/".join(here)))
        elif isinstance(node, Not):
            walk(node.arg, {k: 1 - v for k, v in parity.items()}, here)
        elif isinstance(node, (Box, Diamond)):
            walk(node.arg, parity, here)
        elif isinstance(node, Implies):
            walk(node.left, {k: 1 - v for k, v in parity.items()}, here + ("left",))
            walk(node.right, parity, here + ("right",))
        elif isinstance(node, (And, Or)):
            walk(node.left, parity, here + ("left",))
            walk(node.right, parity, here + ("right",))
        elif isinstance(node, (Mu, Nu)):
            walk(node.body, {**parity, node.var: 0}, path + (f"{type(node).__name__}({node.var})",))

    walk(phi, {}, ())
    return out


def to_nnf(phi: Formula, negate: bool = False, flipped: frozenset = frozenset()) -> Formula:
    """Push negations to propositions; ``not mu X.f(X)`` becomes ``nu X.not f(not X)``.

    ``flipped`` holds variables whose binder was dualised, so their
    occurrences stand for the negated variable.
    """
    if isinstance(phi, Prop):
        return Not(phi) if negate else phi
    if isinstance(phi, Top):
        return Bottom() if negate else phi
    if isinstance(phi, Bottom):
        return Top() if negate else phi
    if isinstance(phi, Var):
        if negate != (phi.name in flipped):
            raise PositivityError([Violation(phi.name, "nnf")])
        return Var(phi.name)
    if isinstance(phi, Not):
        return to_nnf(phi.arg, not negate, flipped)
    if isinstance(phi, Implies):
        return to_nnf(Or(Not(phi.left), phi.right), negate, flipped)
    if isinstance(phi, (And, Or)):
        dual = (Or if isinstance(phi, And) else And) if negate else type(phi)
        return dual(to_nnf(phi.left, negate, flipped), to_nnf(phi.right, negate, flipped))
    if isinstance(phi, (Box, Diamond)):
        dual = (Diamond if isinstance(phi, Box) else Box) if negate else type(phi)
        return dual(to_nnf(phi.arg, negate, flipped))
    if isinstance(phi, (Mu, Nu)):
        dual = (Nu if isinstance(phi, Mu) else Mu) if negate else type(phi)
        inner = flipped | {phi.var} if negate else flipped - {phi.var}
        return dual(phi.var, to_nnf(phi.body, negate, inner))
    raise DomainError(f"not a formula: {phi!r}")


# -- frames and evaluation -------------------------------------------------

@dataclass(frozen=True)
class KripkeFrame:
    states: tuple
    transitions: frozenset = frozenset()
    labeling: Mapping[str, frozenset] = field(default_factory=dict)
    _index: dict = field(init=False, repr=False, compare=False)
    _succ: tuple = field(init=False, repr=False, compare=False)
    _label: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        states = tuple(self.states)
        if len(set(states)) != len(states):
            raise DomainError("duplicate state identifiers")
        index = {s: k for k, s in enumerate(states)}
        trans = frozenset((a, b) for a, b in self.transitions)
        for a, b in trans:
            if a not in index or b not in index:
                raise DomainError(f"transition ({a!r}, {b!r}) leaves the state set")
        labeling = {}
        for prop, where in dict(self.labeling).items():
            where = frozenset(where)
            if not where <= set(states):
                raise DomainError(f"label {prop!r} names unknown states {sorted(map(str, where - set(states)))}")
            labeling[prop] = where
        succ = [0] * len(states)
        for a, b in trans:
            succ[index[a]] |= 1 << index[b]
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "labeling", labeling)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_succ", tuple(succ))
        object.__setattr__(self, "_label", {p: self.mask(w) for p, w in labeling.items()})

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def all_mask(self) -> int:
        return (1 << len(self.states)) - 1

    def mask(self, states: Iterable) -> int:
        m = 0
        for s in states:
            try:
                m |= 1 << self._index[s]
            except KeyError:
                raise DomainError(f"unknown state {s!r}") from None
        return m

    def members(self, mask: int) -> frozenset:
        return frozenset(s for k, s in enumerate(self.states) if mask >> k & 1)

    def successors(self, state) -> list:
        m = self._succ[self._index[state]]
        return [s for k, s in enumerate(self.states) if m >> k & 1]

    def label_mask(self, prop: str) -> int:
        return self._label.get(prop, 0)

    def box(self, s: int) -> int:
        return sum(1 << k for k, m in enumerate(self._succ) if m & ~s == 0)

    def diamond(self, s: int) -> int:
        return sum(1 << k for k, m in enumerate(self._succ) if m & s)


def _eval(phi: Formula, frame: KripkeFrame, env: dict, naive: bool) -> int:
    if isinstance(phi, Prop):
        return frame.label_mask(phi.name)
    if isinstance(phi, Var):
        try:
            return env[phi.name]
        except KeyError:
            raise DomainError(f"free variable {phi.name!r} has no binding") from None
    if isinstance(phi, Top):
        return frame.all_mask
    if isinstance(phi, Bottom):
        return 0
    if isinstance(phi, Not):
        return frame.all_mask & ~_eval(phi.arg, frame, env, naive)
    if isinstance(phi, And):
        return _eval(phi.left, frame, env, naive) & _eval(phi.right, frame, env, naive)
    if isinstance(phi, Or):
        return _eval(phi.left, frame, env, naive) | _eval(phi.right, frame, env, naive)
    if isinstance(phi, Implies):
        return (frame.all_mask & ~_eval(phi.left, frame, env, naive)) | _eval(phi.right, frame, env, naive)
    if isinstance(phi, Box):
        return frame.box(_eval(phi.arg, frame, env, naive))
    if isinstance(phi, Diamond):
        return frame.diamond(_eval(phi.arg, frame, env, naive))
    if isinstance(phi, (Mu, Nu)):
        least = isinstance(phi, Mu)

        def body(s):
            return _eval(phi.body, frame, {**env, phi.var: s}, naive)

        if naive:
            out = frame.all_mask if least else 0
            for s in range(1 << frame.size):
                b = body(s)
                if least and b & ~s == 0:
                    out &= s
                elif not least and s & ~b == 0:
                    out |= s
            return out
        s = 0 if least else frame.all_mask
        for _ in range(frame.size + 2):
            nxt = body(s)
            if nxt == s:
                return s
            s = nxt
        raise AssertionError("fixpoint iteration exceeded the frame height; body is not monotone")
    raise DomainError(f"not a formula: {phi!r}")


def _prepare(phi: Formula) -> Formula:
    bad = check_positivity(phi)
    if bad:
        raise PositivityError(bad)
    return to_nnf(phi)


def mc_eval(phi: Formula, frame: KripkeFrame, env: Mapping[str, Iterable] | None = None) -> frozenset:
    """Denotation of ``phi`` by Kleene iteration of every fixpoint.

    Nested fixpoints restart from scratch on each outer round (no
    Emerson-Lei reuse).
    """
    phi = _prepare(phi)
    env_masks = {k: frame.mask(v) for k, v in (env or {}).items()}
    return frame.members(_eval(phi, frame, env_masks, naive=False))


def naive_eval(phi: Formula, frame: KripkeFrame, env: Mapping[str, Iterable] | None = None,
               bound: int = NAIVE_BOUND) -> frozenset:
    """Denotation straight from the set-theoretic definition: intersection of
    all pre-fixed points for ``mu``, union of all post-fixed points for ``nu``."""
    if frame.size > bound:
        raise CapacityError(f"{frame.size} states exceed the naive-evaluation bound {bound}")
    phi = _prepare(phi)
    env_masks = {k: frame.mask(v) for k, v in (env or {}).items()}
    return frame.members(_eval(phi, frame, env_masks, naive=True))


def body_operator(phi: Formula, frame: KripkeFrame, env: Mapping[str, Iterable] | None = None):
    """The set operator ``S -> [[body]][X := S]`` of a ``Mu``/``Nu`` formula."""
    phi = _prepare(phi)
    if not isinstance(phi, (Mu, Nu)):
        raise DomainError("body_operator needs a fixpoint formula")
    base = {k: frame.mask(v) for k, v in (env or {}).items()}

    def op(states: Iterable) -> frozenset:
        return frame.members(_eval(phi.body, frame, {**base, phi.var: frame.mask(states)}, naive=False))

    return op


# -- safety preservation ---------------------------------------------------

@dataclass
class SafetyReport:
    invariant: str
    event: str
    invariant_states: list
    eventual_states: list
    hypothesis_holds: bool
    hypothesis_violations: list
    witness_paths: dict
    counterexamples: list
    conclusion_holds: bool
    invariant_conclusion_holds: bool

    @property
    def consistent(self) -> bool:
        """A holding hypothesis never comes with a failing conclusion."""
        return (not self.hypothesis_holds) or self.conclusion_holds


def safety_preservation_check(frame: KripkeFrame, invariant: str, event: str) -> SafetyReport:
    """Check that reaching an ``event`` state never breaks ``invariant``.

    ``P = nu X. I & []X`` and ``Q = mu Y. E | <>Y``.  The hypothesis is
    checked edge by edge: every transition out of an I-state into an
    E-state must land in an I-state.  The conclusion is checked along
    witnesses: from every I-state in Q, take a shortest path to an E-state
    whose states before the last one all satisfy I; its endpoint must
    satisfy I.  ``invariant_conclusion_holds`` is the weaker statement for
    states in P and Q (every reachable E-state lies in P).
    """
    for prop in (invariant, event):
        if prop not in frame.labeling:
            raise DomainError(f"proposition {prop!r} is not labelled in the frame")
    order = {s: k for k, s in enumerate(frame.states)}
    inv = frame.labeling[invariant]
    ev = frame.labeling[event]
    P = mc_eval(Nu("X", And(Prop(invariant), Box(Var("X")))), frame)
    Q = mc_eval(Mu("Y", Or(Prop(event), Diamond(Var("Y")))), frame)

    violations = sorted(((a, b) for a, b in frame.transitions if a in inv and b in ev and b not in inv),
                        key=lambda e: (order[e[0]], order[e[1]]))

    paths = {}
    for w in frame.states:
        if w not in Q or w not in inv:
            continue
        path = _witness_path(frame, w, inv, ev)
        if path is not None:
            paths[w] = path
    counter = [p for p in paths.values() if p[-1] not in inv]

    inv_ok = True
    for w in P & Q:
        for u in _reachable(frame, w):
            if u in ev and (u not in inv or u not in P):
                inv_ok = False

    return SafetyReport(
        invariant=invariant,
        event=event,
        invariant_states=sorted(P, key=order.get),
        eventual_states=sorted(Q, key=order.get),
        hypothesis_holds=not violations,
        hypothesis_violations=[list(e) for e in violations],
        witness_paths=paths,
        counterexamples=counter,
        conclusion_holds=not counter,
        invariant_conclusion_holds=inv_ok,
    )


def _witness_path(frame, start, inv, ev):
    if start in ev:
        return [start]
    prev = {start: None}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for t in frame.successors(s):
            if t in prev:
                continue
            prev[t] = s
            if t in ev:
                path = [t]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            if t in inv:
                queue.append(t)
    return None


def _reachable(frame, start):
    seen = {start}
    queue = deque([start])
    while queue:
        for t in frame.successors(queue.popleft()):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def compare_alternation(body: str, frame: KripkeFrame, outer: str = "X", inner: str = "Y") -> dict:
    """Evaluate ``nu X. mu Y. body`` and ``mu Y. nu X. body`` side by side.

    Purely an experiment: it reports whether the two denotations coincide
    on this frame and asserts nothing either way.
    """
    nu_mu = parse_mu(f"nu {outer}. mu {inner}. ({body})")
    mu_nu = parse_mu(f"mu {inner}. nu {outer}. ({body})")
    order = {s: k for k, s in enumerate(frame.states)}
    a = sorted(mc_eval(nu_mu, frame), key=order.get)
    b = sorted(mc_eval(mu_nu, frame), key=order.get)
    return {"nu_mu": a, "mu_nu": b, "equal": a == b}


def all_subsets(items: list) -> Iterable[frozenset]:
    for r in range(len(items) + 1):
        for c in itertools.combinations(items, r):
            yield frozenset(c)
