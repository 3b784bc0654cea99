import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from fixlimits import generators as gen
from fixlimits import lattice as L
from fixlimits import optimize as O
from fixlimits.errors import CapacityError, DomainError

TOL = O.TOL


def two_items():
    op = L.Operator.from_rules("ab", [])
    A = O.AccountabilityModel({"a": 2.0, "b": 1.0})
    model = O.RiskModel.uniform("ab")
    return op, A, model


def risk_oracle(x, model):
    """Written straight from the decomposition, term by term."""
    x = set(x)
    pi = sum(model.pi.get(i, 0) for i in x)
    lam = sum(model.lam.get(i, 0) for i in x)
    phi = sum(model.phi.get(i, 0) for i in x)
    g = sum(model.g.get(i, 0) for i in x) + sum(w for pair, w in model.pairs.items() if set(pair) <= x)
    return model.alpha * pi + model.beta * lam + model.gamma * phi + model.delta * g


# -- risk -------------------------------------------------------------------

def test_risk_examples():
    m = O.RiskModel(("a",), alpha=2, beta=0, gamma=0, delta=0, pi={"a": 1})
    assert O.risk(set(), m) == 0
    assert O.risk({"a"}, m) == 2
    with pytest.raises(DomainError):
        O.risk({"b"}, m)
    with pytest.raises(DomainError):
        O.RiskModel(("a",), pi={"a": -1})


def test_risk_matches_decomposition_and_is_monotone():
    rng = random.Random(0)
    model = gen.random_risk_model(rng, gen.item_names(8), pair_prob=0.3)
    items = model.items
    for _ in range(10_000):
        y = {i for i in items if rng.random() < 0.5}
        x = {i for i in y if rng.random() < 0.5}
        rx, ry = O.risk(x, model), O.risk(y, model)
        assert math.isclose(rx, risk_oracle(x, model), abs_tol=1e-9)
        assert rx <= ry + TOL


# -- least fixed point ---------------------------------------------------------

def test_lfp_risk_identity_and_constant():
    ident = L.Operator.from_rules("abc", [])
    rep = O.least_risk_fixedpoint_check(ident, O.RiskModel.uniform("abc"))
    assert rep["lfp"] == [] and rep["lfp_risk"] == 0 and len(rep["fixed_points"]) == 8 and rep["passed"]
    const = L.Operator.from_table("ab", {frozenset(s): frozenset("b") for s in ["", "a", "b", "ab"]})
    rep = O.least_risk_fixedpoint_check(const, O.RiskModel.uniform("ab"))
    assert [f["state"] for f in rep["fixed_points"]] == [["b"]] and rep["passed"]


def test_lfp_risk_random_eight_items():
    rng = random.Random(8)
    op = gen.random_policy(rng, 8)
    model = gen.random_risk_model(rng, op.universe.items)
    rep = O.least_risk_fixedpoint_check(op, model)
    assert rep["passed"]
    assert min(f["risk"] for f in rep["fixed_points"]) == pytest.approx(rep["lfp_risk"])


def test_corollary_direction_only():
    op = L.Operator.from_rules("ab", [((), "a")])
    rep = O.least_risk_fixedpoint_check(op, O.RiskModel.uniform("ab"),
                                        accountability=O.AccountabilityModel({"a": 1.0}), A0=1.0)
    assert rep["corollary_applies"] and rep["corollary_holds"]
    rep = O.least_risk_fixedpoint_check(op, O.RiskModel.uniform("ab"),
                                        accountability=O.AccountabilityModel({"b": 1.0}), A0=1.0)
    assert not rep["corollary_applies"] and rep["corollary_holds"]


# -- greedy -----------------------------------------------------------------

def test_greedy_two_items_picks_a():
    op, A, model = two_items()
    res = O.greedy_min_transparency(op, A, 2.0, model)
    assert res.status == "ok" and res.state == {"a"}


def test_greedy_zero_floor_is_lfp():
    rng = random.Random(1)
    for _ in range(50):
        op = gen.random_policy(rng, rng.randint(1, 8))
        model = gen.random_risk_model(rng, op.universe.items)
        acc = gen.random_accountability(rng, op.universe.items)
        assert O.greedy_min_transparency(op, acc, 0.0, model).state == L.lfp(op).value


def test_greedy_infeasible():
    op, A, model = two_items()
    assert O.greedy_min_transparency(op, A, 4.0, model).status == "infeasible"


def test_greedy_zero_marginal_risk_ranks_first():
    op = L.Operator.from_rules("ab", [])
    model = O.RiskModel("ab", pi={"a": 1.0, "b": 0.0}, beta=0, gamma=0, delta=0)
    res = O.greedy_min_transparency(op, O.AccountabilityModel({"a": 5.0, "b": 1.0}), 1.0, model)
    assert res.state == {"b"}


def test_greedy_tie_broken_by_name():
    op = L.Operator.from_rules("ba", [])
    res = O.greedy_min_transparency(op, O.AccountabilityModel({"a": 1.0, "b": 1.0}), 1.0,
                                    O.RiskModel.uniform("ba"))
    assert res.state == {"a"}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000))
def test_greedy_feasible_and_post_fixed(seed):
    rng = random.Random(seed)
    op = gen.random_policy(rng, rng.randint(1, 8))
    model = gen.random_risk_model(rng, op.universe.items)
    acc = gen.random_accountability(rng, op.universe.items)
    A0 = rng.uniform(0, acc(op.universe.top))
    res = O.greedy_min_transparency(op, acc, A0, model)
    x = op.universe.mask(res.state)
    assert res.status == "ok"
    assert res.accountability >= A0 - TOL
    assert op.step(x) & ~x == 0
    best = O.brute_force_optimum(op, acc, A0, model)
    assert best is not None and best[0] <= res.risk + TOL


# -- KKT --------------------------------------------------------------------

def test_kkt_slack_gives_zero_eta():
    op, A, model = two_items()
    rep = O.kkt_report({"a"}, op, A, 1.0, model)
    assert rep.eta == 0 and rep.slackness_product == 0 and not rep.binding


def test_kkt_binding_two_items():
    op, A, model = two_items()
    rep = O.kkt_report({"a"}, op, A, 2.0, model)
    assert rep.binding and rep.slackness_product <= 1e-9 and rep.passed


def test_kkt_empty_zero_floor():
    op, A, model = two_items()
    rep = O.kkt_report(set(), op, A, 0.0, model)
    assert rep.eta == 0 and rep.passed


def test_kkt_eta_is_least_valid_multiplier():
    # oracle: scan candidate multipliers on a fine grid
    op, A, model = two_items()
    rep = O.kkt_report({"a", "b"}, op, A, 1.0, model)

    def ok(eta):
        lx = O.risk({"a", "b"}, model) + eta * (1.0 - A({"a", "b"}))
        for y in ({"a"}, {"b"}):
            if A(y) >= 1.0:
                if lx > O.risk(y, model) + eta * (1.0 - A(y)) + TOL:
                    return False
        return True

    grid = [k / 100 for k in range(1000)]
    least = next(e for e in grid if ok(e))
    assert rep.eta == pytest.approx(least, abs=0.01)


# -- garbling ---------------------------------------------------------------

def test_garble_identical():
    op = L.Operator.from_rules("ab", [((), "a"), ("a", "b")])
    rep = O.garble_compare(op, op, O.RiskModel.uniform("ab"))
    assert rep["passed"] and rep["x1"] == rep["x2"] and rep["risk1"] == rep["risk2"]


def test_garble_strict():
    fine = L.Operator.from_rules("ab", [((), "ab")])
    coarse = L.Operator.from_rules("ab", [((), "a")])
    rep = O.garble_compare(fine, coarse, O.RiskModel.uniform("ab"))
    assert rep["risk2"] < rep["risk1"] and rep["passed"]


def test_garble_hypothesis_violation():
    fine = L.Operator.from_rules("ab", [((), "a")])
    coarse = L.Operator.from_rules("ab", [((), "a"), ("a", "b")])
    rep = O.garble_compare(fine, coarse, O.RiskModel.uniform("ab"))
    assert not rep["hypothesis_holds"]
    assert rep["witness"]["extra"] == ["b"]


def test_process_outcome_labels():
    proc = L.Operator.from_rules("ab", [((), "ab")])
    out = L.Operator.from_rules("ab", [((), "b")])
    rep = O.process_outcome_compare(proc, out, O.RiskModel.uniform("ab"))
    assert rep["outcome_no_riskier"] and rep["outcome_lfp"] == ["b"]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000))
def test_garbling_never_riskier(seed):
    rng = random.Random(seed)
    fine = gen.random_policy(rng, rng.randint(1, 10))
    coarse = gen.garble(fine, rng)
    rep = O.garble_compare(fine, coarse, gen.random_risk_model(rng, fine.universe.items))
    assert rep["hypothesis_holds"] and rep["passed"]


# -- equilibria ---------------------------------------------------------------

def test_equilibria_identity_is_fixpoints():
    op = L.Operator.from_rules("abc", [((), "a"), ("a", "b")])
    eq = O.equilibrium_enumerate(op, lambda x: {x})
    assert eq == L.enumerate_fixpoints(op)


def test_equilibria_constant_empty():
    op = L.Operator.from_rules("ab", [])
    assert O.equilibrium_enumerate(op, lambda x: {frozenset()}) == {frozenset()}
    op2 = L.Operator.from_rules("ab", [((), "a")])
    assert O.equilibrium_enumerate(op2, lambda x: {frozenset()}) == {frozenset()}


def test_equilibria_random_dual_scan():
    rng = random.Random(6)
    op = gen.random_policy(rng, 6)
    table = gen.random_best_response(rng, op.universe)
    # second scan: go through the table entries instead of the states
    second = {x for x in table if x in table[frozenset(L.apply(op, x))]}
    assert O.equilibrium_enumerate(op, table) == second


def test_equilibria_partial_table():
    op = L.Operator.from_rules("a", [])
    with pytest.raises(DomainError):
        O.equilibrium_enumerate(op, {frozenset(): {frozenset()}})


# -- Lawvere -----------------------------------------------------------------

def test_lawvere_n1():
    rep = O.lawvere_check(1, {0: (0,)})
    assert rep["surjective"] and rep["every_endomap_has_fixed_point"] and rep["passed"]


@pytest.mark.parametrize("n", [2, 3])
def test_lawvere_every_e(n):
    maps = list(itertools.product(range(n), repeat=n))
    count = 0
    for e in itertools.product(maps, repeat=n):
        rep = O.lawvere_check(n, dict(enumerate(e)))
        assert not rep["surjective"] and rep["diagonal_outside_image"]
        assert tuple(rep["diagonal"]) not in set(e)
        count += 1
        if n == 3 and count > 3000:
            break
    swap = rep["fixed_point_free_endomap"]
    assert all(swap[x] != x for x in range(n))


def test_lawvere_capacity():
    with pytest.raises(CapacityError):
        O.lawvere_check(5, lambda x: (0,) * 5)


# -- calculators ---------------------------------------------------------------

def test_breach_bound():
    assert O.breach_bound(1.0) == 0.0
    assert O.breach_bound(0.0) == 1.0
    assert O.breach_bound(0.75) == 0.25
    with pytest.raises(DomainError):
        O.breach_bound(1.5)


def test_convergence_examples():
    chain = L.Operator.from_rules("abc", [((), "a"), ("a", "b"), ("b", "c")])
    unit = O.RiskModel.uniform("abc")
    assert O.iterative_risk_convergence(chain, unit, 0.5) == 3
    assert O.iterative_risk_convergence(L.Operator.from_rules("abc", []), unit, 0.5) == 0
    assert O.iterative_risk_convergence(chain, unit, 10.0) == 0


def test_stratify():
    m = O.RiskModel(("a", "b"), delta=2.0, pi={"a": 1, "b": 1}, pairs={("a", "b"): 0.5})
    rep = O.stratify_compare({"a"}, {"b"}, m)
    assert rep["gap"] == pytest.approx(1.0) and rep["superadditive"]
    assert O.stratify_compare({"a"}, set(), m)["gap"] == 0
    assert O.stratify_compare({"a"}, {"b"}, O.RiskModel.uniform("ab"))["gap"] == 0
    with pytest.raises(DomainError):
        O.stratify_compare({"a"}, {"a"}, m)


def test_mixture():
    assert O.mixture_gaming_eval([(0, 0), (1, 3)], 0.3)["gap"] == pytest.approx(0)
    rep = O.mixture_gaming_eval([(0, 0), (1, 1)], 0.5, g_fn=lambda t: t * t)
    assert rep["expected_g"] == 0.5 and rep["g_at_mean"] == 0.25 and rep["gap"] == 0.25
    for p in (0.0, 1.0):
        assert O.mixture_gaming_eval([(0, 0), (1, 1)], p, g_fn=lambda t: t * t)["gap"] == 0
    with pytest.raises(DomainError):
        O.mixture_gaming_eval([(0, 0)], 0.5)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=3, max_size=6), st.floats(0, 1))
def test_mixture_convex_points_nonnegative_gap(slopes, p):
    ys, y = [0.0], 0.0
    for s in sorted(slopes):
        y += s
        ys.append(y)
    rep = O.mixture_gaming_eval(list(enumerate(ys)), p)
    assert rep["convex"] and rep["gap_nonnegative"]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000))
def test_kkt_holds_at_true_optimum(seed):
    # at the brute-force optimum no feasible single move lowers risk, so the
    # dual estimate is zero and slackness holds; contrast with the greedy
    rng = random.Random(seed)
    op = gen.random_policy(rng, rng.randint(1, 8))
    model = gen.random_risk_model(rng, op.universe.items)
    acc = gen.random_accountability(rng, op.universe.items)
    A0 = rng.uniform(0, acc(op.universe.top))
    _, best = O.brute_force_optimum(op, acc, A0, model)
    rep = O.kkt_report(best, op, acc, A0, model)
    assert rep.passed and rep.eta == 0
