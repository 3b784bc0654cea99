import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from fixlimits import generators as gen
from fixlimits import mucalc as M
from fixlimits.errors import CapacityError, DomainError, ParseError, PositivityError


def chain3(p_at=("s2",), **labels):
    lab = {"p": set(p_at), **labels}
    return M.KripkeFrame(("s0", "s1", "s2"), {("s0", "s1"), ("s1", "s2")}, lab)


def test_parse_examples():
    assert M.parse_mu("mu X. p | <>X") == M.Mu("X", M.Or(M.Prop("p"), M.Diamond(M.Var("X"))))
    assert M.parse_mu("nu X. p & []X") == M.Nu("X", M.And(M.Prop("p"), M.Box(M.Var("X"))))


def test_parse_positivity_rejected():
    with pytest.raises(PositivityError) as err:
        M.parse_mu("mu X. !X")
    assert err.value.violations[0].variable == "X"


def test_positivity_examples():
    assert M.check_positivity(M.parse_raw("mu X. p | <>X")) == []
    assert M.check_positivity(M.parse_raw("nu X. mu Y. (p & []X) | <>Y")) == []
    assert M.check_positivity(M.parse_raw("mu X. !!X")) == []
    assert [v.variable for v in M.check_positivity(M.parse_raw("mu X. X -> p"))] == ["X"]


def test_parse_errors_have_location():
    with pytest.raises(ParseError) as err:
        M.parse_mu("mu X. p |\n  & q")
    assert "line 2" in str(err.value)
    with pytest.raises(M.UnboundVariableError):
        M.parse_mu("p | X")


def test_to_text_roundtrip():
    rng = random.Random(7)
    for _ in range(100):
        phi = gen.random_mu_formula(rng, 4)
        assert M.parse_raw(M.to_text(phi)) == phi


def test_identity_fixpoints():
    for n in range(4):
        frame = gen.random_frame(random.Random(n), n)
        assert M.mc_eval(M.parse_mu("mu X. X"), frame) == frozenset()
        assert M.mc_eval(M.parse_mu("nu X. X"), frame) == frozenset(frame.states)
        assert M.naive_eval(M.parse_mu("mu X. X"), frame) == frozenset()


def test_reachability_example():
    phi = M.parse_mu("mu X. p | <>X")
    assert M.mc_eval(phi, chain3()) == {"s0", "s1", "s2"}
    assert M.naive_eval(phi, chain3()) == {"s0", "s1", "s2"}


def test_invariance_total_relation():
    frame = M.KripkeFrame(("a", "b"), {(x, y) for x in "ab" for y in "ab"}, {"p": {"a", "b"}})
    assert M.naive_eval(M.parse_mu("nu X. p & []X"), frame) == {"a", "b"}


def test_naive_capacity():
    frame = gen.random_frame(random.Random(0), 7)
    with pytest.raises(CapacityError):
        M.naive_eval(M.parse_mu("mu X. X"), frame)


def test_frame_validation():
    with pytest.raises(DomainError):
        M.KripkeFrame(("a",), {("a", "b")})
    with pytest.raises(DomainError):
        M.KripkeFrame(("a", "a"))


def brute_denotation(phi, frame, env):
    """Third oracle: direct recursive semantics with fixpoints as
    intersections/unions of all pre/post-fixed subsets."""
    S = frozenset(frame.states)
    succ = {s: {t for a, t in frame.transitions if a == s} for s in frame.states}
    subsets = [frozenset(c) for r in range(len(S) + 1) for c in itertools.combinations(frame.states, r)]

    def ev(f, env):
        if isinstance(f, M.Prop):
            return frozenset(frame.labeling.get(f.name, ()))
        if isinstance(f, M.Var):
            return env[f.name]
        if isinstance(f, M.Top):
            return S
        if isinstance(f, M.Bottom):
            return frozenset()
        if isinstance(f, M.Not):
            return S - ev(f.arg, env)
        if isinstance(f, M.And):
            return ev(f.left, env) & ev(f.right, env)
        if isinstance(f, M.Or):
            return ev(f.left, env) | ev(f.right, env)
        if isinstance(f, M.Box):
            inner = ev(f.arg, env)
            return frozenset(s for s in S if succ[s] <= inner)
        if isinstance(f, M.Diamond):
            inner = ev(f.arg, env)
            return frozenset(s for s in S if succ[s] & inner)
        if isinstance(f, M.Mu):
            out = S
            for X in subsets:
                if ev(f.body, {**env, f.var: X}) <= X:
                    out &= X
            return out
        if isinstance(f, M.Nu):
            out = frozenset()
            for X in subsets:
                if X <= ev(f.body, {**env, f.var: X}):
                    out |= X
            return out
        raise TypeError(f)

    return ev(phi, env)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 4), st.integers(1, 4))
def test_mc_eval_matches_independent_semantics(seed, n, depth):
    rng = random.Random(seed)
    frame = gen.random_frame(rng, n)
    phi = gen.random_mu_formula(rng, depth)
    fast = M.mc_eval(phi, frame)
    assert fast == M.naive_eval(phi, frame)
    assert fast == brute_denotation(phi, frame, {})


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 4))
def test_nnf_preserves_negation_semantics(seed, n):
    rng = random.Random(seed)
    frame = gen.random_frame(rng, n)
    phi = gen.random_mu_formula(rng, 3)
    neg = M.to_nnf(M.Not(phi))
    assert M.mc_eval(neg, frame) == frozenset(frame.states) - M.mc_eval(phi, frame)


def test_safety_universal_invariant():
    frame = M.KripkeFrame(("a", "b"), {("a", "b"), ("b", "a")}, {"I": {"a", "b"}, "E": {"b"}})
    rep = M.safety_preservation_check(frame, "I", "E")
    assert rep.hypothesis_holds and rep.conclusion_holds and rep.consistent


def test_safety_chain_witness():
    frame = chain3(I={"s0", "s1", "s2"}, E={"s2"})
    rep = M.safety_preservation_check(frame, "I", "E")
    assert rep.conclusion_holds and rep.hypothesis_holds
    assert rep.witness_paths["s0"] == ["s0", "s1", "s2"]
    assert rep.invariant_states == ["s0", "s1", "s2"]


def test_safety_counterexample():
    frame = chain3(I={"s0", "s1"}, E={"s2"})
    rep = M.safety_preservation_check(frame, "I", "E")
    assert not rep.hypothesis_holds and not rep.conclusion_holds
    assert rep.hypothesis_violations == [["s1", "s2"]]
    assert ["s0", "s1", "s2"] in rep.counterexamples
    assert rep.consistent


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 6))
def test_safety_hypothesis_implies_conclusion(seed, n):
    rng = random.Random(seed)
    frame = gen.random_frame(rng, n, props=("I", "E"))
    rep = M.safety_preservation_check(frame, "I", "E")
    assert rep.consistent


def test_alternation_experiment_reports_only():
    frame = chain3()
    out = M.compare_alternation("(p & []X) | <>Y", frame)
    assert set(out) == {"nu_mu", "mu_nu", "equal"}
    assert out["equal"] == (out["nu_mu"] == out["mu_nu"])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 5))
def test_fixpoint_property_ordering_and_monotone_body(seed, n):
    rng = random.Random(seed)
    frame = gen.random_frame(rng, n)
    phi = gen.random_mu_formula(rng, 3)
    while not isinstance(phi, (M.Mu, M.Nu)):
        phi = gen.random_mu_formula(rng, 3)
    mu, nu = M.Mu(phi.var, phi.body), M.Nu(phi.var, phi.body)
    F = M.body_operator(mu, frame)
    lo, hi = M.mc_eval(mu, frame), M.mc_eval(nu, frame)
    assert F(lo) == lo and F(hi) == hi
    assert lo <= hi
    states = list(frame.states)
    for _ in range(10):
        big = {s for s in states if rng.random() < 0.6}
        small = {s for s in big if rng.random() < 0.5}
        assert F(small) <= F(big)
