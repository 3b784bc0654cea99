"""Finite-frame semantics for provability logic GL.

Formulas reuse the mucalc syntax without fixpoint binders.  A GL frame is a
strict partial order on ``range(n)``; ``raw=True`` lifts that requirement so
counterexample frames (reflexive, cyclic, non-transitive) can be built.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import CapacityError, DomainError
from .mucalc import (And, Bottom, Box, Diamond, Formula, Implies, Mu, Not, Nu, Or, Prop, Top, Var,
                     parse_raw, propositions, to_text)

FRAME_BOUND = 4
PROP_BOUND = 3


def parse_modal(text: str) -> Formula:
    return parse_raw(text, binders=False)


def lob(phi: Formula) -> Formula:
    """``[](([]phi) -> phi) -> []phi``"""
    return Implies(Box(Implies(Box(phi), phi)), Box(phi))


def axiom_k(p: Formula, q: Formula) -> Formula:
    return Implies(Box(Implies(p, q)), Implies(Box(p), Box(q)))


def axiom_4(p: Formula) -> Formula:
    return Implies(Box(p), Box(Box(p)))


@dataclass(frozen=True)
class GLFrame:
    n: int
    relation: frozenset = frozenset()
    raw: bool = False
    _succ: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rel = frozenset((int(a), int(b)) for a, b in self.relation)
        for a, b in rel:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise DomainError(f"edge ({a}, {b}) outside range({self.n})")
        object.__setattr__(self, "relation", rel)
        if not self.raw:
            if not is_irreflexive(self.n, rel):
                raise DomainError("GL frames must be irreflexive (use raw=True for counterexamples)")
            if not is_transitive(self.n, rel):
                raise DomainError("GL frames must be transitive (use raw=True for counterexamples)")
        succ = [0] * self.n
        for a, b in rel:
            succ[a] |= 1 << b
        object.__setattr__(self, "_succ", tuple(succ))

    @property
    def is_gl(self) -> bool:
        return is_irreflexive(self.n, self.relation) and is_transitive(self.n, self.relation)


def is_irreflexive(n, rel) -> bool:
    return all((a, a) not in rel for a in range(n))


def is_transitive(n, rel) -> bool:
    return all((a, c) in rel for a, b in rel for b2, c in rel if b == b2)


def find_cycle(n, rel) -> Optional[list[int]]:
    """Some cycle ``[s0, ..., s0]`` in the relation, or None."""
    succ = {a: sorted(b for x, b in rel if x == a) for a in range(n)}
    color = [0] * n
    stack: list[int] = []

    def dfs(v):
        color[v] = 1
        stack.append(v)
        for w in succ[v]:
            if color[w] == 1:
                return stack[stack.index(w):] + [w]
            if color[w] == 0:
                found = dfs(w)
                if found:
                    return found
        stack.pop()
        color[v] = 2
        return None

    for v in range(n):
        if color[v] == 0:
            found = dfs(v)
            if found:
                return found
    return None


def enumerate_gl_frames(n: int, bound: int = FRAME_BOUND) -> Iterator[GLFrame]:
    """Every strict partial order on ``range(n)``, each exactly once.

    Built one element at a time: the new element ``v`` gets a down-set
    ``D`` (states that see it) and an up-set ``U`` (states it sees) with
    ``D x U`` already in the relation, which keeps the result transitive.
    """
    if n < 0:
        raise DomainError("frame size must be non-negative")
    if n > bound:
        raise CapacityError(f"{n} states exceed the frame enumeration bound {bound}")

    def extend(k, rel):
        if k == n:
            yield GLFrame(n, rel)
            return
        prev = range(k)
        for dbits in range(1 << k):
            down = {i for i in prev if dbits >> i & 1}
            if any((x, d) in rel and x not in down for d in down for x in prev):
                continue
            for ubits in range(1 << k):
                if dbits & ubits:
                    continue
                up = {i for i in prev if ubits >> i & 1}
                if any((u, y) in rel and y not in up for u in up for y in prev):
                    continue
                if any((d, u) not in rel for d in down for u in up):
                    continue
                yield from extend(k + 1, rel | {(d, k) for d in down} | {(k, u) for u in up})

    yield from extend(0, frozenset())


def brute_force_gl_frames(n: int) -> list[frozenset]:
    """Independent oracle: filter all irreflexive relations for transitivity."""
    if n > FRAME_BOUND:
        raise CapacityError(f"{n} states exceed the frame enumeration bound {FRAME_BOUND}")
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    out = []
    for bits in range(1 << len(pairs)):
        rel = frozenset(p for k, p in enumerate(pairs) if bits >> k & 1)
        if is_transitive(n, rel):
            out.append(rel)
    return out


def _holds(phi: Formula, frame: GLFrame, labels: dict) -> int:
    full = (1 << frame.n) - 1
    if isinstance(phi, Prop):
        return labels.get(phi.name, 0)
    if isinstance(phi, Top):
        return full
    if isinstance(phi, Bottom):
        return 0
    if isinstance(phi, Not):
        return full & ~_holds(phi.arg, frame, labels)
    if isinstance(phi, And):
        return _holds(phi.left, frame, labels) & _holds(phi.right, frame, labels)
    if isinstance(phi, Or):
        return _holds(phi.left, frame, labels) | _holds(phi.right, frame, labels)
    if isinstance(phi, Implies):
        return (full & ~_holds(phi.left, frame, labels)) | _holds(phi.right, frame, labels)
    if isinstance(phi, Box):
        s = _holds(phi.arg, frame, labels)
        return sum(1 << k for k, m in enumerate(frame._succ) if m & ~s == 0)
    if isinstance(phi, Diamond):
        s = _holds(phi.arg, frame, labels)
        return sum(1 << k for k, m in enumerate(frame._succ) if m & s)
    if isinstance(phi, (Var, Mu, Nu)):
        raise DomainError("fixpoint constructs are not part of the modal language")
    raise DomainError(f"not a modal formula: {phi!r}")


def find_countermodel(phi: Formula, frame: GLFrame, max_props: int = PROP_BOUND) -> Optional[dict]:
    """First ``{state, labeling}`` falsifying ``phi``, scanning labelings in order."""
    props = sorted(propositions(phi))
    if len(props) > max_props:
        raise CapacityError(f"{len(props)} propositions exceed the labeling bound {max_props}")
    full = (1 << frame.n) - 1
    for masks in itertools.product(range(1 << frame.n), repeat=len(props)):
        labels = dict(zip(props, masks))
        bad = full & ~_holds(phi, frame, labels)
        if bad:
            state = (bad & -bad).bit_length() - 1
            return {"state": state,
                    "labeling": {p: [k for k in range(frame.n) if m >> k & 1] for p, m in labels.items()}}
    return None


def valid_in_frame(phi: Formula, frame: GLFrame, max_props: int = PROP_BOUND) -> bool:
    return find_countermodel(phi, frame, max_props) is None


def diagnose_frame(frame: GLFrame) -> dict:
    """Structural reasons a frame is not a GL frame."""
    rel = frame.relation
    missing = sorted({(a, c) for a, b in rel for b2, c in rel if b == b2 and (a, c) not in rel})
    return {
        "transitive": not missing,
        "missing_transitive_edges": [list(e) for e in missing],
        "reflexive_states": sorted(a for a in range(frame.n) if (a, a) in rel),
        "cycle": find_cycle(frame.n, rel),
    }


# -- the six-line derivation -------------------------------------------------

RULES = ("Premise", "D1", "D2", "D3", "Taut", "MP")


@dataclass(frozen=True)
class DerivationStep:
    index: int
    formula: Formula
    rule: str
    refs: tuple
    check: bool
    cited_rule: str
    cited_rule_valid: bool
    note: str = ""

    def as_dict(self) -> dict:
        return {"line": self.index, "formula": to_text(self.formula), "rule": self.rule,
                "refs": list(self.refs), "check": self.check, "cited_rule": self.cited_rule,
                "cited_rule_valid": self.cited_rule_valid, "note": self.note}


@dataclass(frozen=True)
class DerivationTrace:
    steps: tuple

    @property
    def checked(self) -> bool:
        return all(s.check for s in self.steps)

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1].formula

    def as_dict(self) -> dict:
        return {"checked": self.checked, "steps": [s.as_dict() for s in self.steps]}


def _atoms_for_taut(phi, table):
    """Propositional skeleton: boxed and diamond subformulas become atoms."""
    if isinstance(phi, (Box, Diamond, Prop)):
        return table.setdefault(phi, len(table))
    if isinstance(phi, Not):
        _atoms_for_taut(phi.arg, table)
    elif isinstance(phi, (And, Or, Implies)):
        _atoms_for_taut(phi.left, table)
        _atoms_for_taut(phi.right, table)
    return table


def _prop_value(phi, table, bits) -> bool:
    if isinstance(phi, (Box, Diamond, Prop)):
        return bool(bits >> table[phi] & 1)
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, Not):
        return not _prop_value(phi.arg, table, bits)
    a = _prop_value(phi.left, table, bits)
    b = _prop_value(phi.right, table, bits)
    if isinstance(phi, And):
        return a and b
    if isinstance(phi, Or):
        return a or b
    return (not a) or b


def entails_propositionally(premises: list, conclusion: Formula) -> bool:
    """Truth-table check with modal subformulas treated as opaque atoms."""
    table: dict = {}
    for f in list(premises) + [conclusion]:
        _atoms_for_taut(f, table)
    for bits in range(1 << len(table)):
        if all(_prop_value(p, table, bits) for p in premises) and not _prop_value(conclusion, table, bits):
            return False
    return True


def _valid_on_small_gl_frames(phi: Formula, max_states: int = 3) -> bool:
    return all(valid_in_frame(phi, f) for n in range(max_states + 1) for f in enumerate_gl_frames(n))


def lob_hazard_replay(name: str = "phi") -> DerivationTrace:
    """Replay the six displayed endorsement lines at proposition ``name``.

    Each line carries the rule actually used to check it (``rule``/``check``)
    and the rule the displayed derivation cites (``cited_rule``) together
    with whether that cited rule really licenses the line.  Two lines do
    not go through as cited: line 5 needs Loeb's axiom (a tautology alone
    gives nothing from ``[]p -> []p``), and line 6 runs D1 backwards.
    """
    p = Prop(name)
    bp = Box(p)
    l1 = Box(Implies(bp, p))
    l2 = Implies(Box(bp), bp)
    l3 = Implies(bp, Box(bp))
    l4 = Implies(bp, bp)
    l5 = bp
    l6 = p

    # (2) D2 / K distribution: from [](A -> B) infer []A -> []B
    ok2 = isinstance(l1, Box) and isinstance(l1.arg, Implies) and l2 == Implies(Box(l1.arg.left), Box(l1.arg.right))
    # (3) D3 instance []A -> [][]A
    ok3 = isinstance(l3, Implies) and isinstance(l3.left, Box) and l3.right == Box(l3.left)
    # (4) chaining (2) and (3) is a propositional consequence
    ok4 = entails_propositionally([l2, l3], l4)
    # (5) as cited: a tautology step from (4) alone
    taut5 = entails_propositionally([l4], l5)
    # (5) as checked: modus ponens of (1) with the Loeb instance, itself
    # verified valid on every GL frame up to three states
    lob_valid = _valid_on_small_gl_frames(lob(p))
    ok5 = lob_valid and lob(p) == Implies(l1, l5)
    # (6) D1 is necessitation (from |- A infer |- []A); the line goes from
    # []A to A, i.e. reflection, which GL does not validate
    backwards = l5 == Box(l6)
    reflection_valid = _valid_on_small_gl_frames(Implies(bp, p))

    steps = (
        DerivationStep(1, l1, "Premise", (), True, "Premise", True),
        DerivationStep(2, l2, "D2", (1,), ok2, "D2", ok2),
        DerivationStep(3, l3, "D3", (), ok3, "D3", ok3),
        DerivationStep(4, l4, "Taut", (2, 3), ok4, "Taut", ok4),
        DerivationStep(5, l5, "MP", (1,), ok5, "Taut", taut5,
                       note="modus ponens with the Loeb axiom instance; the cited tautology step does not yield it"),
        DerivationStep(6, l6, "D1", (5,), backwards, "D1", reflection_valid,
                       note="applies D1 in the reflection direction ([]A to A), not valid in GL"),
    )
    trace = DerivationTrace(steps)
    if not trace.checked:
        raise AssertionError("derivation replay failed an internal check")
    return trace
