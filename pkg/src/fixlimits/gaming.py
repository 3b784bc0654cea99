"""Toy programs that read a published audit and game it.

A program is a tuple of instructions::

    ("load_self",)        own-code register <- this program
    ("audit_self",)       flag <- embedded audit applied to the own-code register
    ("jump_if_not", k)    jump to instruction k when the flag is clear
    ("jump", k)
    ("emit", v)           append integer v to the outputs
    ("harm",)             set the hidden harm flag (the real objective fails)
    ("halt",)

``audit_self`` is where the recursion theorem lives.  The verdict is the
fixed point ``h = m(run(p, verdict=h))``; ``h = True`` is tried first.  When
no fixed point exists (an audit that can see the harm the pass branch
causes) the program runs the pass branch and the run is marked
``self_consistent=False``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Optional, Sequence

import yaml

from .errors import DomainError

DEFAULT_BUDGET = 256


class Observability(str, enum.Enum):
    OUTPUTS_ONLY = "OutputsOnly"
    FULL_TRACE = "FullTrace"


@dataclass(frozen=True)
class Trace:
    outputs: tuple
    harm: bool
    steps: int
    halted: bool
    verdict: Optional[bool] = None
    self_consistent: bool = True

    def as_dict(self) -> dict:
        return {"outputs": list(self.outputs), "harm": self.harm, "steps": self.steps, "halted": self.halted,
                "verdict": self.verdict, "self_consistent": self.self_consistent}


@dataclass(frozen=True)
class AuditPredicate:
    """``fn(outputs, harm)``; ``harm`` is passed as None for OutputsOnly audits."""

    name: str
    observability: Observability
    fn: Callable = field(compare=False)
    budget: int = DEFAULT_BUDGET

    @property
    def harm_aware(self) -> bool:
        return self.observability is Observability.FULL_TRACE

    def judge(self, trace: Trace) -> bool:
        if not trace.halted:
            return False
        harm = trace.harm if self.harm_aware else None
        return bool(self.fn(tuple(trace.outputs), harm))


@dataclass(frozen=True)
class ToyProgram:
    instructions: tuple
    audit: Optional[AuditPredicate] = None

    def __post_init__(self):
        ins = tuple(tuple(i) for i in self.instructions)
        for k, i in enumerate(ins):
            _validate(i, k, len(ins))
        object.__setattr__(self, "instructions", ins)


_ARITY = {"load_self": 0, "audit_self": 0, "jump_if_not": 1, "jump": 1, "emit": 1, "harm": 0, "halt": 0}


def _validate(ins, k, length):
    if not ins or ins[0] not in _ARITY:
        raise DomainError(f"instruction {k}: unknown opcode {ins[:1]}")
    if len(ins) != 1 + _ARITY[ins[0]]:
        raise DomainError(f"instruction {k}: {ins[0]} takes {_ARITY[ins[0]]} argument(s)")
    if ins[0] in ("jump", "jump_if_not") and not (isinstance(ins[1], int) and 0 <= ins[1] < length):
        raise DomainError(f"instruction {k}: jump target {ins[1]!r} out of range")
    if ins[0] == "emit" and not isinstance(ins[1], int):
        raise DomainError(f"instruction {k}: emit needs an integer")


def _execute(p: ToyProgram, budget: int, verdict: Optional[bool]) -> Trace:
    outputs, harm, flag, own = [], False, False, None
    pc = steps = 0
    uses_audit = False
    while steps < budget:
        if pc >= len(p.instructions):
            return Trace(tuple(outputs), harm, steps, True)
        op, *args = p.instructions[pc]
        steps += 1
        pc += 1
        if op == "load_self":
            own = p
        elif op == "audit_self":
            if own is None or own.audit is None:
                raise DomainError("audit_self needs a loaded own-code register and an embedded audit")
            uses_audit = True
            flag = bool(verdict)
        elif op == "jump_if_not":
            if not flag:
                pc = args[0]
        elif op == "jump":
            pc = args[0]
        elif op == "emit":
            outputs.append(args[0])
        elif op == "harm":
            harm = True
        elif op == "halt":
            return Trace(tuple(outputs), harm, steps, True, verdict if uses_audit else None)
    return Trace(tuple(outputs), harm, steps, False, verdict if uses_audit else None)


def run(p: ToyProgram, budget: int = DEFAULT_BUDGET) -> Trace:
    """Deterministic execution; ``halted=False`` when the budget runs out."""
    if budget < 1:
        raise DomainError("budget must be at least 1")
    if not any(i[0] == "audit_self" for i in p.instructions):
        return _execute(p, budget, None)
    m = p.audit
    if m is None:
        raise DomainError("program uses audit_self but carries no audit")
    for h in (True, False):
        t = _execute(p, budget, h)
        if m.judge(t) == h:
            return t
    t = _execute(p, budget, True)
    return Trace(t.outputs, t.harm, t.steps, t.halted, t.verdict, self_consistent=False)


def audit(m: AuditPredicate, p: ToyProgram) -> bool:
    return m.judge(run(p, m.budget))


# -- audit construction ------------------------------------------------------

def _atom(kind: str, arg) -> tuple[Callable, Observability]:
    oo = Observability.OUTPUTS_ONLY
    table = {
        "const": (lambda o, h: bool(arg), oo),
        "some_output_le": (lambda o, h: any(v <= arg for v in o), oo),
        "some_output_ge": (lambda o, h: any(v >= arg for v in o), oo),
        "all_outputs_le": (lambda o, h: all(v <= arg for v in o), oo),
        "all_outputs_ge": (lambda o, h: all(v >= arg for v in o), oo),
        "count_ge": (lambda o, h: len(o) >= arg, oo),
        "count_le": (lambda o, h: len(o) <= arg, oo),
        "sum_le": (lambda o, h: sum(o) <= arg, oo),
        "sum_ge": (lambda o, h: sum(o) >= arg, oo),
        "first_output_eq": (lambda o, h: bool(o) and o[0] == arg, oo),
        "outputs_in": (lambda o, h: all(v in set(arg) for v in o), oo),
        "outputs_sorted": (lambda o, h: list(o) == sorted(o), oo),
        "harm_clear": (lambda o, h: not h, Observability.FULL_TRACE),
    }
    if kind not in table:
        raise DomainError(f"unknown audit kind {kind!r}")
    return table[kind]


def _build(spec) -> tuple[Callable, Observability]:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise DomainError(f"audit spec must be a one-key mapping, got {spec!r}")
    (kind, arg), = spec.items()
    if kind in ("all", "any"):
        parts = [_build(s) for s in arg]
        obs = Observability.FULL_TRACE if any(o.value == "FullTrace" for _, o in parts) else Observability.OUTPUTS_ONLY
        comb = all if kind == "all" else any
        return (lambda o, h: comb(f(o, h) for f, _ in parts)), obs
    if kind == "not":
        f, obs = _build(arg)
        return (lambda o, h: not f(o, h)), obs
    return _atom(kind, arg)


def make_audit(spec: dict, name: str | None = None, budget: int = DEFAULT_BUDGET) -> AuditPredicate:
    """Audit from a declarative spec such as ``{"some_output_le": 10}`` or
    ``{"all": [{"harm_clear": true}, {"sum_le": 10}]}``."""
    fn, obs = _build(spec)
    return AuditPredicate(name or yaml.safe_dump(spec, default_flow_style=True).strip(), obs, fn, budget)


def parse_action(spec: Sequence) -> tuple:
    """``[["harm"], ["emit", 5]]`` or the shorthand ``["harm", "emit 5"]``."""
    out = []
    for item in spec:
        if isinstance(item, str):
            item = item.split()
            item = [item[0]] + [int(x) for x in item[1:]]
        item = tuple(item)
        if item[:1] not in (("emit",), ("harm",)):
            raise DomainError(f"actions may only emit or harm, got {item!r}")
        _validate(item, 0, 1)
        out.append(item)
    return tuple(out)


# -- the gamer ---------------------------------------------------------------

def _check_actions(bad, good):
    bad, good = parse_action(bad), parse_action(good)
    if ("harm",) not in bad:
        raise DomainError("the bad action must set the harm flag")
    if ("harm",) in good:
        raise DomainError("the good action must not set the harm flag")
    return bad, good


def construct_gamer(m: AuditPredicate, bad, good) -> ToyProgram:
    """``load own code; h := m(own code); if h: bad else good``."""
    bad, good = _check_actions(bad, good)
    good_at = 3 + len(bad) + 1
    ins = (("load_self",), ("audit_self",), ("jump_if_not", good_at), *bad, ("halt",), *good, ("halt",))
    return ToyProgram(ins, m)


class GamingOutcome(str, enum.Enum):
    EXPLOIT = "exploit"
    AUDIT_COMPLETE = "audit_complete"
    GOOD_BRANCH = "good_branch"
    BAD_NOT_ACCEPTABLE = "bad_not_acceptable"


_MESSAGES = {
    GamingOutcome.EXPLOIT: "audit passes while the hidden objective fails",
    GamingOutcome.AUDIT_COMPLETE: "audit complete w.r.t. objective - no stable exploit",
    GamingOutcome.GOOD_BRANCH: "audit rejects its own verdict source; program executes the good behaviour",
    GamingOutcome.BAD_NOT_ACCEPTABLE: "bad action's outputs do not satisfy the audit",
}


@dataclass(frozen=True)
class GamingReport:
    audit: str
    observability: str
    program: tuple
    trace: Trace
    audit_pass: bool
    harm: bool
    bad_acceptable: bool
    good_acceptable: bool
    outcome: GamingOutcome

    @property
    def exploit(self) -> bool:
        return self.outcome is GamingOutcome.EXPLOIT

    @property
    def hypothesis_failure(self) -> bool:
        return not self.exploit

    @property
    def branch_agrees(self) -> bool:
        """Internal verdict equals the external audit (self-reference consistency)."""
        return self.trace.verdict == self.audit_pass

    def as_dict(self) -> dict:
        return {
            "audit": self.audit, "observability": self.observability,
            "program": [list(i) for i in self.program], "trace": self.trace.as_dict(),
            "audit_pass": self.audit_pass, "harm": self.harm,
            "bad_acceptable": self.bad_acceptable, "good_acceptable": self.good_acceptable,
            "outcome": self.outcome.value, "message": _MESSAGES[self.outcome],
            "branch_agrees": self.branch_agrees,
        }


def verify_gaming(m: AuditPredicate, bad, good) -> GamingReport:
    bad, good = _check_actions(bad, good)
    gamer = construct_gamer(m, bad, good)
    trace = run(gamer, m.budget)
    passed = m.judge(trace)
    bad_ok = audit(m, ToyProgram((*bad, ("halt",))))
    good_ok = audit(m, ToyProgram((*good, ("halt",))))
    if passed and trace.harm:
        outcome = GamingOutcome.EXPLOIT
    elif m.harm_aware and not bad_ok:
        outcome = GamingOutcome.AUDIT_COMPLETE
    elif trace.verdict is False:
        outcome = GamingOutcome.GOOD_BRANCH
    else:
        outcome = GamingOutcome.BAD_NOT_ACCEPTABLE
    return GamingReport(m.name, m.observability.value, gamer.instructions, trace, passed, trace.harm,
                        bad_ok, good_ok, outcome)


@dataclass(frozen=True)
class SuiteEntry:
    audit: AuditPredicate
    bad: tuple
    good: tuple


def load_suite(text: str | None = None) -> list[SuiteEntry]:
    """The bundled audit suite, or one parsed from YAML ``text``."""
    if text is None:
        text = resources.files("fixlimits").joinpath("data/gaming_suite.yaml").read_text()
    doc = yaml.safe_load(text)
    return [SuiteEntry(make_audit(e["audit"], e.get("name")), parse_action(e["bad"]), parse_action(e["good"]))
            for e in doc["audits"]]
