import pytest
from hypothesis import given, settings, strategies as st

from fixlimits import gaming as G
from fixlimits.errors import DomainError

LE10 = G.make_audit({"some_output_le": 10}, "output <= 10")
HARM_CLEAR = G.make_audit({"harm_clear": True}, "harm clear")


def test_run_examples():
    t = G.run(G.ToyProgram((("emit", 5), ("halt",))))
    assert t.outputs == (5,) and not t.harm and t.halted
    t = G.run(G.ToyProgram((("harm",), ("emit", 5), ("halt",))))
    assert t.outputs == (5,) and t.harm
    p = G.ToyProgram((("emit", 1), ("emit", 2), ("halt",)))
    assert G.run(p) == G.run(p)


def test_budget_exhaustion():
    loop = G.ToyProgram((("emit", 1), ("jump", 0)))
    t = G.run(loop, budget=10)
    assert not t.halted and t.steps == 10
    assert not G.audit(G.make_audit({"const": True}), loop)


def test_audit_examples():
    assert G.audit(LE10, G.ToyProgram((("emit", 5), ("halt",))))
    assert not G.audit(LE10, G.ToyProgram((("emit", 99), ("halt",))))
    assert not G.audit(HARM_CLEAR, G.ToyProgram((("harm",), ("halt",))))


def test_outputs_only_audit_is_blind_to_harm():
    seen = []
    m = G.AuditPredicate("spy", G.Observability.OUTPUTS_ONLY, lambda o, h: seen.append(h) or True)
    G.audit(m, G.ToyProgram((("harm",), ("halt",))))
    assert seen == [None]


def test_gamer_blind_audit():
    gamer = G.construct_gamer(LE10, ["harm", "emit 5"], ["emit 5"])
    t = G.run(gamer)
    assert t.outputs == (5,) and t.harm and t.verdict is True and t.self_consistent
    assert G.audit(LE10, gamer)


def test_gamer_constant_false_runs_good():
    m = G.make_audit({"const": False})
    rep = G.verify_gaming(m, ["harm", "emit 5"], ["emit 5"])
    assert not rep.harm and not rep.audit_pass
    assert rep.outcome is G.GamingOutcome.GOOD_BRANCH


def test_gamer_constant_true_exploits():
    rep = G.verify_gaming(G.make_audit({"const": True}), ["harm", "emit 123"], ["emit 0"])
    assert rep.exploit and rep.branch_agrees


def test_harm_aware_audit_complete():
    rep = G.verify_gaming(HARM_CLEAR, ["harm", "emit 5"], ["emit 5"])
    assert rep.outcome is G.GamingOutcome.AUDIT_COMPLETE
    assert rep.hypothesis_failure and not rep.audit_pass
    assert rep.as_dict()["message"] == "audit complete w.r.t. objective - no stable exploit"


def test_action_validation():
    with pytest.raises(DomainError):
        G.construct_gamer(LE10, ["emit 5"], ["emit 5"])
    with pytest.raises(DomainError):
        G.construct_gamer(LE10, ["harm"], ["harm"])
    with pytest.raises(DomainError):
        G.parse_action(["halt"])
    with pytest.raises(DomainError):
        G.ToyProgram((("jump", 7),))
    with pytest.raises(DomainError):
        G.make_audit({"nonsense": 1})


def test_bundled_suite_shape():
    suite = G.load_suite()
    blind = [e for e in suite if not e.audit.harm_aware]
    aware = [e for e in suite if e.audit.harm_aware]
    assert len(blind) >= 10 and len(aware) >= 3
    for e in blind:
        rep = G.verify_gaming(e.audit, e.bad, e.good)
        assert rep.exploit and rep.audit_pass and rep.harm, e.audit.name
    for e in aware:
        assert G.verify_gaming(e.audit, e.bad, e.good).hypothesis_failure, e.audit.name


values = st.lists(st.integers(-20, 20), min_size=1, max_size=4)


@settings(max_examples=200, deadline=None)
@given(values, st.sampled_from(["some_output_le", "sum_le", "all_outputs_le", "count_le"]), st.integers(-5, 30))
def test_blind_audit_gamed_whenever_bad_outputs_pass(outs, kind, bound):
    # Recursion-theorem construction: if the bad action's outputs satisfy an
    # outputs-only audit, the gamer passes the audit and causes harm.
    m = G.make_audit({kind: bound})
    bad = ["harm"] + [f"emit {v}" for v in outs]
    rep = G.verify_gaming(m, bad, ["emit 0"])
    if rep.bad_acceptable:
        assert rep.exploit and rep.branch_agrees
    else:
        # no stable exploit; when neither verdict is a fixed point the run
        # is flagged as self-inconsistent
        assert not rep.exploit and not rep.audit_pass
        if rep.good_acceptable:
            assert not rep.trace.self_consistent
