"""Seeded property suites, shared by the CLI ``suite`` scenarios and tests.

Each suite returns a plain dict with ``passed``, ``cases`` and a bounded
list of ``failures`` so reports stay small and deterministic.
"""
from __future__ import annotations

import itertools
import random

from . import gaming, gl, lattice, mucalc, optimize, truth
from . import generators as gen

MAX_FAILURES = 5


def _result(cases, failures, **extra):
    return {"passed": not failures, "cases": cases, "failure_count": len(failures),
            "failures": failures[:MAX_FAILURES], **extra}


def liar_suite(seed: int = 0, count: int = 20) -> dict:
    rng = random.Random(seed)
    systems = [("transparency-liar", truth.make_transparency_liar())]
    for k in range(count):
        base = gen.random_sentence_system(rng, rng.randint(1, 6))
        systems.append((f"embedded-{k}", gen.embed_liar(rng, base)))
    failures = []
    for label, sys in systems:
        witness = truth.total_classical_search(sys)
        grade = truth.classify(sys)["L"]
        if witness is not None or grade is not truth.Grounding.UNGROUNDED:
            failures.append({"system": label, "witness": witness, "liar": grade.value})
    return _result(len(systems), failures)


def all_classical_models(sys: truth.SentenceSystem) -> list[dict]:
    """Independent oracle: every two-valued assignment that satisfies each
    definition and lets Trans agree with the value of its argument."""
    names = sys.names
    out = []
    for bits in itertools.product((False, True), repeat=len(names)):
        v = dict(zip(names, bits))
        if any(v[g] != b for g, b in sys.ground.items()):
            continue
        tv = {n: truth.ThreeVal.of(b) for n, b in v.items()}
        if all(truth.kleene_eval(phi, tv) == tv[n] for n, phi in sys.definitions.items()):
            out.append(v)
    return out


def _random_valuation_pair(rng, sys):
    lo, hi = {}, {}
    for n in sys.names:
        val = rng.choice((truth.ThreeVal.F, truth.ThreeVal.T))
        r = rng.random()
        if r < 0.4:
            lo[n] = hi[n] = truth.ThreeVal.N
        elif r < 0.7:
            lo[n], hi[n] = truth.ThreeVal.N, val
        else:
            lo[n] = hi[n] = val
    return lo, hi


def kripke_suite(seed: int = 0, count: int = 100, pairs: int = 1000, max_names: int = 8) -> dict:
    rng = random.Random(seed)
    failures = []
    systems = []
    models = 0
    for k in range(count):
        sys = gen.random_sentence_system(rng, rng.randint(1, max_names))
        systems.append(sys)
        grades = truth.classify(sys)
        for w in all_classical_models(sys):
            models += 1
            for n, g in grades.items():
                if (g is truth.Grounding.GROUNDED_TRUE and not w[n]) or (g is truth.Grounding.GROUNDED_FALSE and w[n]):
                    failures.append({"system": k, "name": n, "grade": g.value, "model": w})
    mono_failures = 0
    for _ in range(pairs):
        sys = rng.choice(systems)
        lo, hi = _random_valuation_pair(rng, sys)
        if not truth.valuation_le(truth.jump(sys, lo), truth.jump(sys, hi)):
            mono_failures += 1
            failures.append({"jump_monotonicity": {"lo": {k: v.name for k, v in lo.items()},
                                                   "hi": {k: v.name for k, v in hi.items()}}})
    return _result(count, failures, classical_models=models, jump_pairs=pairs, jump_failures=mono_failures)


def mucalc_suite(seed: int = 0, count: int = 200, max_states: int = 5, depth: int = 4) -> dict:
    rng = random.Random(seed)
    failures = []
    for k in range(count):
        frame = gen.random_frame(rng, rng.randint(1, max_states))
        phi = gen.random_mu_formula(rng, depth)
        fast = mucalc.mc_eval(phi, frame)
        slow = mucalc.naive_eval(phi, frame)
        if fast != slow:
            failures.append({"case": k, "formula": mucalc.to_text(phi),
                             "mc_eval": sorted(fast), "naive_eval": sorted(slow)})
    return _result(count, failures)


def lob_suite(seed: int = 0, max_states: int = 3, samples: int = 50) -> dict:
    rng = random.Random(seed)
    failures = []
    frames = []
    counts = {}
    for n in range(max_states + 1):
        fs = list(gl.enumerate_gl_frames(n))
        oracle = gl.brute_force_gl_frames(n)
        counts[n] = len(fs)
        if len(fs) != len(oracle) or {f.relation for f in fs} != set(oracle):
            failures.append({"frame_count": n, "constructive": len(fs), "oracle": len(oracle)})
        frames += fs
    p = mucalc.Prop("p")
    formulas = [p] + [gen.random_modal_formula(rng, 2) for _ in range(samples)]
    for phi in formulas:
        inst = gl.lob(phi)
        for f in frames:
            cm = gl.find_countermodel(inst, f, max_props=2)
            if cm is not None:
                failures.append({"formula": mucalc.to_text(inst), "frame": sorted(f.relation), "countermodel": cm})
                break
    reflexive = gl.GLFrame(1, {(0, 0)}, raw=True)
    refl_invalid = not gl.valid_in_frame(gl.lob(p), reflexive)
    if not refl_invalid:
        failures.append({"reflexive_counterexample": "Loeb unexpectedly valid"})
    return _result(len(formulas), failures, frame_counts=counts, reflexive_invalid=refl_invalid)


def gaming_suite() -> dict:
    failures = []
    blind = aware = 0
    for entry in gaming.load_suite():
        rep = gaming.verify_gaming(entry.audit, entry.bad, entry.good)
        if entry.audit.harm_aware:
            aware += 1
            ok = rep.hypothesis_failure
        else:
            blind += 1
            ok = rep.exploit and rep.audit_pass and rep.harm and rep.branch_agrees
        if not ok:
            failures.append({"audit": entry.audit.name, "outcome": rep.outcome.value})
    return _result(blind + aware, failures, outputs_only=blind, harm_aware=aware)


def _policy_instance(rng, max_items):
    op = gen.random_policy(rng, rng.randint(1, max_items))
    model = gen.random_risk_model(rng, op.universe.items)
    return op, model


def lfp_risk_suite(seed: int = 0, count: int = 100, max_items: int = 10) -> dict:
    rng = random.Random(seed)
    failures = []
    for k in range(count):
        op, model = _policy_instance(rng, max_items)
        rep = optimize.least_risk_fixedpoint_check(op, model)
        if not rep["passed"]:
            failures.append({"case": k, "lfp": rep["lfp"]})
    return _result(count, failures)


def garbling_suite(seed: int = 0, count: int = 100, max_items: int = 10) -> dict:
    rng = random.Random(seed)
    failures = []
    for k in range(count):
        fine, model = _policy_instance(rng, max_items)
        coarse = gen.garble(fine, rng)
        rep = optimize.garble_compare(fine, coarse, model)
        if not rep["passed"]:
            failures.append({"case": k, **{key: rep.get(key) for key in ("x1", "x2", "risk1", "risk2", "witness")}})
    return _result(count, failures)


def greedy_instance(rng, max_items=8):
    op = gen.random_policy(rng, rng.randint(4, max_items))
    model = gen.random_risk_model(rng, op.universe.items)
    acc = gen.random_accountability(rng, op.universe.items)
    A0 = round(rng.uniform(0, acc(op.universe.top)), 1)
    return op, model, acc, A0


def greedy_suite(seed: int = 0, count: int = 50, max_items: int = 8) -> dict:
    rng = random.Random(seed)
    failures = []
    max_product = 0.0
    for k in range(count):
        op, model, acc, A0 = greedy_instance(rng, max_items)
        res = optimize.greedy_min_transparency(op, acc, A0, model)
        x = op.universe.mask(res.state)
        dual = optimize.kkt_report(res.state, op, acc, A0, model)
        max_product = max(max_product, dual.slackness_product)
        problems = []
        if res.status != "ok" or res.accountability < A0 - optimize.TOL:
            problems.append("infeasible")
        if op.step(x) & ~x:
            problems.append("not post-fixed")
        if dual.slackness_product > optimize.TOL:
            problems.append("slackness")
        zero = optimize.greedy_min_transparency(op, acc, 0.0, model)
        if zero.state != lattice.lfp(op).value:
            problems.append("A0=0 differs from lfp")
        if problems:
            failures.append({"case": k, "problems": problems, "state": sorted(res.state), "A0": A0,
                             "accountability": res.accountability, "eta": dual.eta,
                             "slackness_product": dual.slackness_product})
    return _result(count, failures, max_slackness_product=max_product)


def convergence_suite(seed: int = 0, count: int = 100, max_items: int = 10) -> dict:
    chain = lattice.Operator.from_rules("abc", [((), "a"), ("a", "b"), ("b", "c")])
    n = optimize.iterative_risk_convergence(chain, optimize.RiskModel.uniform("abc"), 0.5)
    failures = [] if n == 3 else [{"chain_example": n}]
    rng = random.Random(seed)
    for k in range(count):
        op, model = _policy_instance(rng, max_items)
        seq = optimize.risk_sequence(op, model)
        if any(b < a - optimize.TOL for a, b in zip(seq, seq[1:])):
            failures.append({"case": k, "sequence": seq})
    return _result(count + 1, failures, chain_n=n)


def lp_suite() -> dict:
    sys = truth.make_transparency_liar().merge(truth.SentenceSystem({}, {"rho": False}))
    val, witness = truth.lp_model(sys)
    liar_glut = "L" in val.designated_true and "L" in val.designated_false
    rho_ok = "rho" not in val.designated_true
    failures = [] if (liar_glut and rho_ok and witness is not None and truth.lp_satisfies(sys, val)) else [
        {"designated_true": sorted(val.designated_true), "designated_false": sorted(val.designated_false),
         "witness": witness}]
    return _result(1, failures, designated_true=sorted(val.designated_true),
                   designated_false=sorted(val.designated_false), witness=witness)


SUITES = {
    "liar": liar_suite,
    "kripke": kripke_suite,
    "mucalc": mucalc_suite,
    "lob": lob_suite,
    "gaming": gaming_suite,
    "lfp_risk": lfp_risk_suite,
    "garbling": garbling_suite,
    "greedy": greedy_suite,
    "convergence": convergence_suite,
    "lp": lp_suite,
}
