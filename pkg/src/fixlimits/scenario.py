"""Scenario files: schema, loading, dispatch and reports.

A scenario is a YAML mapping with a ``kind`` and kind-specific payload.
Each kind produces a list of checks; a check's status is ``pass``,
``fail``, ``infeasible`` or ``capacity``.  When a check carries an
``expect`` mapping, its status is decided by comparing those fields of
the check data; otherwise by the check's own verification.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import yaml

from . import gaming, gl, lattice, mucalc, optimize, suites, truth
from .errors import CapacityError, DomainError, FixlimitsError, ParseError

SCHEMA_VERSION = 1
KINDS = ("lattice", "truth", "mucalc", "gl", "gaming", "optimize", "suite")


class ScenarioError(Exception):
    """Input problem: unreadable file, bad YAML, schema violation, bad payload."""


# -- schema ------------------------------------------------------------------

_items = {"type": "array", "items": {"type": "string"}}
_rule = {
    "oneOf": [
        {"type": "array", "minItems": 2, "maxItems": 2, "items": _items},
        {"type": "object", "required": ["then"], "additionalProperties": False,
         "properties": {"if": _items, "then": _items}},
    ]
}
_policy = {
    "universe": _items,
    "rules": {"type": "array", "items": _rule},
    "inflationary": {"type": "boolean"},
    "table": {"type": "array", "items": {"type": "object", "required": ["state", "image"],
                                         "additionalProperties": False,
                                         "properties": {"state": _items, "image": _items}}},
}
_check = {"type": "object", "required": ["op"], "properties": {"op": {"type": "string"},
                                                               "name": {"type": "string"},
                                                               "expect": {"type": "object"}}}
_score = {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}}

SCENARIO_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "fixlimits scenario",
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "seed": {"type": "integer"},
        "fuel": {"type": "integer", "minimum": 1},
        "bound": {"type": "integer", "minimum": 0},
        "checks": {"type": "array", "items": _check},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "lattice"}}},
         "then": {"required": ["universe"], "properties": _policy}},
        {"if": {"properties": {"kind": {"const": "truth"}}},
         "then": {"properties": {"definitions": {"type": "object", "additionalProperties": {"type": "string"}},
                                 "ground": {"type": "object", "additionalProperties": {"type": "boolean"}},
                                 "trans_reading": {"enum": ["kleene", "closed"]}}}},
        {"if": {"properties": {"kind": {"const": "mucalc"}}},
         "then": {"required": ["frame"],
                  "properties": {"frame": {"type": "object", "required": ["states"],
                                           "properties": {"states": _items,
                                                          "edges": {"type": "array", "items": _items},
                                                          "labels": {"type": "object",
                                                                     "additionalProperties": _items}}}}}},
        {"if": {"properties": {"kind": {"const": "gl"}}},
         "then": {"properties": {"raw_relation": {"type": "boolean"}}}},
        {"if": {"properties": {"kind": {"const": "gaming"}}},
         "then": {"properties": {"audits": {"type": "array", "items": {
             "type": "object", "required": ["audit", "bad", "good"],
             "properties": {"name": {"type": "string"}, "audit": {"type": "object"},
                            "bad": {"type": "array"}, "good": {"type": "array"},
                            "expect": {"type": "object"}}}},
             "bundled": {"type": "boolean"}}}},
        {"if": {"properties": {"kind": {"const": "optimize"}}},
         "then": {"required": ["universe"],
                  "properties": {**_policy,
                                 "risk": {"type": "object", "properties": {
                                     "alpha": {"type": "number", "minimum": 0},
                                     "beta": {"type": "number", "minimum": 0},
                                     "gamma": {"type": "number", "minimum": 0},
                                     "delta": {"type": "number", "minimum": 0},
                                     "pi": _score, "lam": _score, "phi": _score, "g": _score,
                                     "pairs": {"type": "array", "items": {
                                         "type": "array", "minItems": 3, "maxItems": 3}}}},
                                 "accountability": {"type": "object", "properties": {
                                     "gains": _score, "cap": {"type": "number", "minimum": 0}}},
                                 "gain": {"type": "object", "properties": {
                                     "utilities": _score, "weight": {"type": "number", "minimum": 0}}}}}},
        {"if": {"properties": {"kind": {"const": "suite"}}},
         "then": {"required": ["suite"],
                  "properties": {"suite": {"enum": sorted(suites.SUITES)},
                                 "params": {"type": "object"}}}},
    ],
}


# -- loading -----------------------------------------------------------------

def _locate(node, path):
    """Best-effort line/column for a JSON path into a composed YAML node."""
    for key in path:
        if isinstance(node, yaml.MappingNode):
            nxt = next((v for k, v in node.value if k.value == key), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            nxt = node.value[key]
        else:
            nxt = None
        if nxt is None:
            break
        node = nxt
    mark = node.start_mark
    return mark.line + 1, mark.column + 1


def load_scenario(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read ({exc.strerror})") from None
    return parse_scenario(text, str(path))


def parse_scenario(text: str, source: str = "<string>") -> dict:
    try:
        doc = yaml.safe_load(text)
        node = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f":{mark.line + 1}:{mark.column + 1}" if mark else ""
        raise ScenarioError(f"{source}{where}: YAML error: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(doc, dict):
        raise ScenarioError(f"{source}:1:1: scenario must be a mapping")
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        line, col = _locate(node, list(err.absolute_path))
        where = "/".join(map(str, err.absolute_path)) or "<root>"
        raise ScenarioError(f"{source}:{line}:{col}: {where}: {err.message}")
    _syntax_check(doc, node, source)
    doc.setdefault("name", Path(source).stem)
    return doc


def _syntax_check(doc, node, source):
    """Parse embedded sentences and formulas up front so syntax errors are
    reported against the file rather than the string."""
    fields = []
    if doc["kind"] == "truth":
        fields = [(["definitions", n], truth.parse_sentence) for n in doc.get("definitions", {})]
    elif doc["kind"] in ("mucalc", "gl"):
        parse = mucalc.parse_raw if doc["kind"] == "mucalc" else gl.parse_modal
        fields = [(["checks", k, "formula"], parse) for k, c in enumerate(doc.get("checks", []))
                  if isinstance(c.get("formula"), str)]
    for path, parse in fields:
        value = doc
        for key in path:
            value = value[key]
        try:
            parse(value)
        except ParseError as exc:
            line, col = _locate(node, path)
            # the string starts at (line, col); offsets inside it are relative
            if exc.line == 1:
                col += exc.column - 1
            else:
                line, col = line + exc.line - 1, exc.column
            where = "/".join(map(str, path))
            raise ScenarioError(f"{source}:{line}:{col}: {where}: {exc}") from None


# -- reports -----------------------------------------------------------------

@dataclass
class Check:
    name: str
    status: str
    data: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "data": _jsonable(self.data)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if hasattr(x, "value") and isinstance(getattr(x, "value"), (str, int)) and not isinstance(x, (bool, int)):
        return x.value
    return x


def _matches(expected, actual) -> bool:
    if isinstance(expected, float) or isinstance(actual, float):
        try:
            return math.isclose(float(expected), float(actual), rel_tol=1e-9, abs_tol=1e-9)
        except (TypeError, ValueError):
            return False
    if isinstance(expected, dict) and isinstance(actual, dict):
        return all(k in actual and _matches(v, actual[k]) for k, v in expected.items())
    if isinstance(expected, list) and isinstance(actual, list):
        return len(expected) == len(actual) and all(_matches(a, b) for a, b in zip(expected, actual))
    return expected == actual


def _finish(name: str, ok: bool, data: dict, expect: Optional[dict], fail_status: str = "fail") -> Check:
    data = _jsonable(data)
    if expect:
        mismatches = {k: {"expected": v, "actual": data.get(k)} for k, v in expect.items()
                      if not _matches(v, data.get(k))}
        if mismatches:
            data["mismatches"] = mismatches
            return Check(name, "fail", data)
        return Check(name, "pass", data)
    return Check(name, "pass" if ok else fail_status, data)


@dataclass
class Options:
    fuel: Optional[int] = None
    seed: Optional[int] = None
    bound: Optional[int] = None
    raw_relation: bool = False


def _settings(doc, opts: Options):
    fuel = opts.fuel if opts.fuel is not None else doc.get("fuel", 1000)
    seed = opts.seed if opts.seed is not None else doc.get("seed", 0)
    bound = opts.bound if opts.bound is not None else doc.get("bound", lattice.ENUMERATION_BOUND)
    return fuel, seed, bound


def run_scenario(doc: dict, opts: Options | None = None) -> dict:
    """Run a validated scenario; raises ScenarioError on payload problems."""
    opts = opts or Options()
    fuel, seed, bound = _settings(doc, opts)
    started = time.perf_counter()
    handler = _HANDLERS[doc["kind"]]
    try:
        checks = handler(doc, fuel=fuel, seed=seed, bound=bound, opts=opts)
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"{doc.get('name')}: {exc}") from None
    statuses = [c.status for c in checks]
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": doc["name"],
        "kind": doc["kind"],
        "seed": seed,
        "checks": [c.as_dict() for c in checks],
        "status": "pass" if statuses and all(s == "pass" for s in statuses) else "fail",
        "timing": {"seconds": round(time.perf_counter() - started, 6)},
    }


def strip_timing(report: dict) -> dict:
    out = {k: v for k, v in report.items() if k != "timing"}
    if "scenarios" in out:
        out["scenarios"] = [strip_timing(r) for r in out["scenarios"]]
    return out


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False)


def _guard(name, fn, expect=None):
    """Run ``fn() -> (ok, data[, status])``; capacity problems become a check status."""
    try:
        out = fn()
    except CapacityError as exc:
        return Check(name, "capacity", {"error": str(exc)})
    except FixlimitsError as exc:
        if isinstance(exc, DomainError):
            raise
        return _finish(name, False, {"error": str(exc), "error_type": type(exc).__name__}, expect)
    ok, data = out[0], out[1]
    fail_status = out[2] if len(out) > 2 else "fail"
    return _finish(name, ok, data, expect, fail_status)


def _checks(doc, default):
    specs = doc.get("checks")
    if not specs:
        return [{"op": op} for op in default]
    return specs


def _label(spec):
    return spec.get("name", spec["op"])


# -- kind: lattice -------------------------------------------------------------

def _rules(raw):
    out = []
    for r in raw or []:
        if isinstance(r, dict):
            out.append((tuple(r.get("if", [])), tuple(r["then"])))
        else:
            out.append((tuple(r[0]), tuple(r[1])))
    return out


def build_operator(doc, key_prefix="") -> lattice.Operator:
    universe = lattice.Universe(tuple(doc["universe"]))
    rules = _rules(doc.get(key_prefix + "rules"))
    table = doc.get(key_prefix + "table")
    inflationary = doc.get(key_prefix + "inflationary", table is None)
    tmap = None
    if table is not None:
        tmap = {frozenset(e["state"]): frozenset(e["image"]) for e in table}
    return lattice.Operator(universe, tuple(rules), inflationary, tmap)


def _members(u, x):
    return u.sorted_members(u.mask(x))


def _lattice(doc, fuel, seed, bound, opts):
    op = build_operator(doc)
    u = op.universe
    checks = []
    for spec in _checks(doc, ["lfp", "gfp", "monotone", "fixpoints"]):
        kind = spec["op"]
        f = spec.get("fuel", fuel)

        def run(kind=kind, f=f, spec=spec):
            if kind in ("lfp", "gfp"):
                res = (lattice.lfp if kind == "lfp" else lattice.gfp)(op, f)
                return res.converged, {"value": _members(u, res.value), "steps": res.steps,
                                       "status": res.status.value,
                                       "trace": [_members(u, t) for t in res.trace]}
            if kind == "apply":
                return True, {"value": _members(u, op(spec["state"]))}
            if kind == "monotone":
                v = lattice.check_monotone(op, seed=seed, exhaustive_bound=bound)
                return not v, {"violations": [[_members(u, a), _members(u, b)] for a, b in v],
                               "mode": "exhaustive" if u.size <= bound else "sampled", "seed": seed}
            if kind == "fixpoints":
                masks = lattice.fixpoint_masks(op, bound)
                fps = [u.sorted_members(m) for m in masks]
                low, high = lattice.lfp(op, f), lattice.gfp(op, f)
                lo_m, hi_m = u.mask(low.value), u.mask(high.value)
                extremal = (low.converged and high.converged
                            and all(lo_m & ~m == 0 and m & ~hi_m == 0 for m in masks))
                return extremal, {"fixpoints": fps, "count": len(fps), "extremal": extremal}
            raise DomainError(f"unknown lattice check {kind!r}")

        checks.append(_guard(_label(spec), run, spec.get("expect")))
    return checks


# -- kind: truth ---------------------------------------------------------------

def _truth(doc, fuel, seed, bound, opts):
    sys = truth.SentenceSystem.parse(doc.get("definitions", {}), doc.get("ground", {}))
    reading = doc.get("trans_reading", "kleene")
    checks = []
    for spec in _checks(doc, ["kripke", "classify", "classical_search", "lp_model"]):
        kind = spec["op"]

        def run(kind=kind):
            if kind == "kripke":
                res = truth.kripke_lfp(sys)
                return True, {"valuation": {k: v.name for k, v in res.valuation.items()},
                              "stages": len(res.stages),
                              "trans": {k: v.name for k, v in res.trans_extension(reading).items()},
                              "trans_reading": reading}
            if kind == "classify":
                return True, {"classification": {k: v.value for k, v in truth.classify(sys).items()}}
            if kind == "classical_search":
                w = truth.total_classical_search(sys)
                return True, {"witness": w}
            if kind == "lp_model":
                val, witness = truth.lp_model(sys)
                ok = truth.lp_satisfies(sys, val)
                return ok, {"designated_true": sorted(val.designated_true),
                            "designated_false": sorted(val.designated_false),
                            "gluts": sorted(val.gluts), "witness": witness, "satisfies": ok}
            raise DomainError(f"unknown truth check {kind!r}")

        checks.append(_guard(_label(spec), run, spec.get("expect")))
    return checks


# -- kind: mucalc --------------------------------------------------------------

def build_frame(raw) -> mucalc.KripkeFrame:
    edges = []
    for e in raw.get("edges", []):
        if len(e) != 2:
            raise DomainError(f"edge {e} must have two endpoints")
        edges.append(tuple(e))
    return mucalc.KripkeFrame(tuple(raw["states"]), frozenset(edges),
                              {k: frozenset(v) for k, v in raw.get("labels", {}).items()})


def _mucalc(doc, fuel, seed, bound, opts):
    frame = build_frame(doc["frame"])
    order = {s: k for k, s in enumerate(frame.states)}

    def ordered(xs):
        return sorted(xs, key=order.get)

    checks = []
    for spec in _checks(doc, []):
        kind = spec["op"]

        def run(kind=kind, spec=spec):
            if kind == "eval":
                raw = mucalc.parse_raw(spec["formula"])
                bad = mucalc.check_positivity(raw)
                if bad:
                    return False, {"positivity": [{"variable": v.variable, "path": v.path} for v in bad]}
                phi = mucalc.to_nnf(raw)
                fast = ordered(mucalc.mc_eval(phi, frame))
                data = {"formula": mucalc.to_text(phi), "states": fast}
                ok = True
                if frame.size <= mucalc.NAIVE_BOUND:
                    slow = ordered(mucalc.naive_eval(phi, frame))
                    data["naive_agrees"] = ok = slow == fast
                return ok, data
            if kind == "positivity":
                bad = mucalc.check_positivity(mucalc.parse_raw(spec["formula"]))
                return not bad, {"violations": [{"variable": v.variable, "path": v.path} for v in bad]}
            if kind == "safety":
                rep = mucalc.safety_preservation_check(frame, spec["invariant"], spec["event"])
                data = {k: v for k, v in rep.__dict__.items()}
                data["consistent"] = rep.consistent
                return rep.consistent, data
            if kind == "alternation":
                return True, mucalc.compare_alternation(spec["body"], frame)
            raise DomainError(f"unknown mucalc check {kind!r}")

        checks.append(_guard(_label(spec), run, spec.get("expect")))
    return checks


# -- kind: gl ------------------------------------------------------------------

def _gl(doc, fuel, seed, bound, opts):
    raw_ok = opts.raw_relation or doc.get("raw_relation", False)
    checks = []
    for spec in _checks(doc, ["replay"]):
        kind = spec["op"]

        def run(kind=kind, spec=spec):
            if kind == "frames":
                n = spec["n"]
                fs = list(gl.enumerate_gl_frames(n))
                oracle = gl.brute_force_gl_frames(n)
                ok = {f.relation for f in fs} == set(oracle) and len(fs) == len(oracle)
                return ok, {"n": n, "count": len(fs), "oracle_count": len(oracle)}
            if kind == "valid":
                phi = gl.parse_modal(spec["formula"])
                if "frame" in spec:
                    fr = spec["frame"]
                    rel = frozenset(tuple(e) for e in fr.get("relation", []))
                    probe = gl.GLFrame(fr["n"], rel, raw=True)
                    if not probe.is_gl and not raw_ok:
                        raise DomainError("frame is not transitive and irreflexive; pass --raw-relation")
                    frames = [probe]
                else:
                    frames = [f for n in range(spec.get("max_states", 3) + 1) for f in gl.enumerate_gl_frames(n)]
                for f in frames:
                    cm = gl.find_countermodel(phi, f)
                    if cm is not None:
                        return False, {"valid": False, "frame": {"n": f.n, "relation": sorted(f.relation)},
                                       "countermodel": cm, "diagnosis": gl.diagnose_frame(f)}
                return True, {"valid": True, "frames_checked": len(frames)}
            if kind == "replay":
                return True, gl.lob_hazard_replay(spec.get("phi", "phi")).as_dict()
            raise DomainError(f"unknown gl check {kind!r}")

        checks.append(_guard(_label(spec), run, spec.get("expect")))
    return checks


# -- kind: gaming --------------------------------------------------------------

def _gaming(doc, fuel, seed, bound, opts):
    entries = []
    if doc.get("bundled"):
        entries += [(e.audit.name, e.audit, e.bad, e.good, None) for e in gaming.load_suite()]
    for k, e in enumerate(doc.get("audits", [])):
        name = e.get("name", f"audit-{k}")
        entries.append((name, gaming.make_audit(e["audit"], name, budget=fuel if fuel < 10_000 else 10_000),
                        e["bad"], e["good"], e.get("expect")))
    checks = []
    for name, m, bad, good, expect in entries:
        def run(m=m, bad=bad, good=good):
            rep = gaming.verify_gaming(m, bad, good)
            expected_exploit = (not m.harm_aware) and rep.bad_acceptable
            ok = rep.exploit == expected_exploit and (rep.branch_agrees or not rep.trace.self_consistent)
            return ok, rep.as_dict()

        checks.append(_guard(name, run, expect))
    return checks


# -- kind: optimize ------------------------------------------------------------

def build_models(doc):
    items = tuple(doc["universe"])
    r = doc.get("risk", {})
    pairs = {(a, b): w for a, b, w in r.get("pairs", [])}
    model = optimize.RiskModel(items, alpha=r.get("alpha", 1.0), beta=r.get("beta", 1.0),
                               gamma=r.get("gamma", 1.0), delta=r.get("delta", 1.0),
                               pi=r.get("pi", {}), lam=r.get("lam", {}), phi=r.get("phi", {}), g=r.get("g", {}),
                               pairs=pairs)
    a = doc.get("accountability", {})
    acc = optimize.AccountabilityModel(a.get("gains", {}), a.get("cap"))
    g = doc.get("gain", {})
    gain = optimize.GainModel(g.get("utilities", {}), g.get("weight", 0.0))
    return model, acc, gain


def _optimize(doc, fuel, seed, bound, opts):
    op = build_operator(doc)
    u = op.universe
    model, acc, gain = build_models(doc)
    checks = []
    for spec in _checks(doc, ["least_risk"]):
        kind = spec["op"]

        def run(kind=kind, spec=spec):
            if kind == "risk":
                return True, {"risk": optimize.risk(spec["state"], model)}
            if kind == "least_risk":
                return _passed(optimize.least_risk_fixedpoint_check(
                    op, model, fuel, min(bound, lattice.ORACLE_BOUND),
                    acc if "A0" in spec else None, spec.get("A0", 0.0)))
            if kind == "greedy":
                res = optimize.greedy_min_transparency(op, acc, spec["A0"], model, fuel)
                x = u.mask(res.state)
                data = res.as_dict(u)
                if res.status == "infeasible":
                    return False, data, "infeasible"
                data["post_fixed"] = op.step(x) & ~x == 0
                ok = res.status == "ok" and data["post_fixed"]
                return ok, data
            if kind == "kkt":
                lam = spec.get("lambda", gain.weight)
                if "state" in spec:
                    x = frozenset(spec["state"])
                else:
                    res = optimize.greedy_min_transparency(op, acc, spec["A0"], model, fuel)
                    if res.status != "ok":
                        return False, res.as_dict(u), "infeasible"
                    x = res.state
                dual = optimize.kkt_report(x, op, acc, spec["A0"], model, lam, gain)
                return dual.passed, {"state": _members(u, x), **dual.as_dict()}
            if kind in ("garble", "process_outcome"):
                other = build_operator({**doc, **spec}, key_prefix="coarse_")
                fn = optimize.garble_compare if kind == "garble" else optimize.process_outcome_compare
                extra = {"A": acc, "A0": spec["A0"]} if "A0" in spec else {}
                return _passed(fn(op, other, model, fuel=fuel, bound=min(bound, lattice.ORACLE_BOUND), **extra))
            if kind == "equilibria":
                br = spec.get("best_response", "identity")
                if br == "identity":
                    table = lambda x: {x}  # noqa: E731
                elif isinstance(br, dict) and "constant" in br:
                    const = frozenset(br["constant"])
                    table = lambda x: {const}  # noqa: E731
                else:
                    raise DomainError("best_response must be 'identity' or {constant: [...]}")
                eq = optimize.equilibrium_enumerate(op, table, min(bound, lattice.ORACLE_BOUND))
                return True, {"equilibria": sorted(_members(u, x) for x in eq)}
            if kind == "lawvere":
                e = {k: tuple(v) for k, v in enumerate(spec["e"])}
                return _passed(optimize.lawvere_check(spec["n"], e))
            if kind == "breach_bound":
                return True, {"bound": optimize.breach_bound(spec["coverage"])}
            if kind == "convergence":
                n = optimize.iterative_risk_convergence(op, model, spec["eps"], fuel)
                return True, {"n": n, "risks": optimize.risk_sequence(op, model, fuel)}
            if kind == "stratify":
                return True, optimize.stratify_compare(spec["first"], spec["second"], model)
            if kind == "mixture":
                if "power" in spec:
                    k = spec["power"]
                    pts = [(lv, 0.0) for lv in spec["levels"]]
                    rep = optimize.mixture_gaming_eval(pts, spec["p"], g_fn=lambda lv: lv ** k)
                else:
                    rep = optimize.mixture_gaming_eval([tuple(pt) for pt in spec["points"]], spec["p"])
                return (not rep["convex"]) or rep["gap_nonnegative"], rep
            raise DomainError(f"unknown optimize check {kind!r}")

        checks.append(_guard(_label(spec), run, spec.get("expect")))
    return checks


def _passed(report):
    return report["passed"], report


# -- kind: suite ---------------------------------------------------------------

def _suite(doc, fuel, seed, bound, opts):
    fn = suites.SUITES[doc["suite"]]
    params = dict(doc.get("params", {}))
    if "seed" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
        params.setdefault("seed", seed)
    return [_guard(doc["suite"], lambda: _passed(fn(**params)), None)]


_HANDLERS = {
    "lattice": _lattice, "truth": _truth, "mucalc": _mucalc, "gl": _gl,
    "gaming": _gaming, "optimize": _optimize, "suite": _suite,
}
