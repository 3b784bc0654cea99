import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from fixlimits import truth as T
from fixlimits import generators as gen
from fixlimits.errors import DomainError, ParseError
from fixlimits.suites import all_classical_models

F, N, TT = T.ThreeVal.F, T.ThreeVal.N, T.ThreeVal.T


def truth_table_value(op, a, b=None):
    """Oracle: strong Kleene tables written out case by case."""
    tables = {
        "not": {F: TT, N: N, TT: F},
        "and": {(x, y): (F if F in (x, y) else N if N in (x, y) else TT) for x in (F, N, TT) for y in (F, N, TT)},
        "or": {(x, y): (TT if TT in (x, y) else N if N in (x, y) else F) for x in (F, N, TT) for y in (F, N, TT)},
    }
    return tables[op][a] if b is None else tables[op][(a, b)]


def test_kleene_examples():
    v = {"n": N, "t": TT, "f": F}
    assert T.kleene_eval(T.Not(T.Ref("n")), v) is N
    assert T.kleene_eval(T.And(T.Ref("t"), T.Ref("f")), v) is F
    assert T.kleene_eval(T.Or(T.Ref("n"), T.Ref("t")), v) is TT


def test_kleene_tables_exhaustive():
    vals = (F, N, TT)
    for a in vals:
        v = {"a": a}
        assert T.kleene_eval(T.Not(T.Ref("a")), v) == truth_table_value("not", a)
        for b in vals:
            v = {"a": a, "b": b}
            assert T.kleene_eval(T.And(T.Ref("a"), T.Ref("b")), v) == truth_table_value("and", a, b)
            assert T.kleene_eval(T.Or(T.Ref("a"), T.Ref("b")), v) == truth_table_value("or", a, b)
            imp = truth_table_value("or", truth_table_value("not", a), b)
            assert T.kleene_eval(T.Implies(T.Ref("a"), T.Ref("b")), v) == imp
            back = truth_table_value("or", truth_table_value("not", b), a)
            assert T.kleene_eval(T.Iff(T.Ref("a"), T.Ref("b")), v) == truth_table_value("and", imp, back)
            assert T.kleene_eval(T.Trans("a"), v) == a


def test_unresolved_name():
    with pytest.raises(DomainError):
        T.kleene_eval(T.Trans("zz"), {})


def test_liar():
    sys = T.make_transparency_liar()
    assert sys.definitions == {"L": T.Not(T.Trans("L"))}
    assert T.kripke_lfp(sys).valuation == {"L": N}
    assert T.total_classical_search(sys) is None
    assert T.classify(sys) == {"L": T.Grounding.UNGROUNDED}


def test_grounded_one_stage():
    sys = T.SentenceSystem.parse({"M": "trans(a)", "P": "not(trans(a))"}, {"a": True})
    res = T.kripke_lfp(sys)
    assert res.stages[1]["M"] is TT
    assert T.classify(sys) == {"M": T.Grounding.GROUNDED_TRUE, "P": T.Grounding.GROUNDED_FALSE,
                               "a": T.Grounding.GROUNDED_TRUE}


def test_truth_teller():
    sys = T.SentenceSystem.parse({"K": "trans(K)"})
    assert T.kripke_lfp(sys).valuation["K"] is N
    assert T.total_classical_search(sys) == {"K": False}
    assert len(all_classical_models(sys)) == 2


def test_classical_single_constraint():
    sys = T.SentenceSystem.parse({"M": "trans(Mp)"}, {"Mp": True})
    assert T.total_classical_search(sys) == {"M": True, "Mp": True}


def test_empty_system():
    sys = T.SentenceSystem()
    assert T.classify(sys) == {}
    val, witness = T.lp_model(sys)
    assert not val.designated_true and not val.designated_false and witness is None


def test_lp_liar_rho():
    sys = T.make_transparency_liar().merge(T.SentenceSystem({}, {"rho": False}))
    val, witness = T.lp_model(sys)
    assert "L" in val.designated_true and "L" in val.designated_false
    assert "rho" not in val.designated_true and "rho" in val.designated_false
    assert witness == "rho"
    assert T.lp_satisfies(sys, val)


def test_lp_without_paradox_matches_classical():
    sys = T.SentenceSystem.parse({"M": "trans(a)", "P": "and(trans(M), not(trans(b)))"}, {"a": True, "b": False})
    val, _ = T.lp_model(sys)
    w = T.total_classical_search(sys)
    assert not val.gluts
    assert val.designated_true == {n for n, b in w.items() if b}
    assert val.designated_false == {n for n, b in w.items() if not b}


def test_trans_reading_flag():
    res = T.kripke_lfp(T.make_transparency_liar())
    assert res.trans_extension("kleene") == {"L": N}
    assert res.trans_extension("closed") == {"L": F}


def test_parser_roundtrip_and_errors():
    phi = T.parse_sentence("iff(atom(x,true), or(ref(a), trans(b), not(trans(c))))")
    assert T.parse_sentence(T.to_text(phi)) == phi
    with pytest.raises(ParseError) as err:
        T.parse_sentence("and(trans(a))")
    assert "line 1" in str(err.value)
    with pytest.raises(ParseError):
        T.parse_sentence("not(trans(a)")
    with pytest.raises(ParseError) as err:
        T.parse_sentence("not(\n  bogus(a))")
    assert "line 2" in str(err.value)


def test_system_validation():
    with pytest.raises(DomainError):
        T.SentenceSystem.parse({"a": "trans(a)"}, {"a": True})
    with pytest.raises(DomainError):
        T.SentenceSystem.parse({"a": "trans(b)"})


def test_lp_non_explosion_with_unreferenced_atom():
    rng = random.Random(5)
    for _ in range(30):
        base = gen.random_sentence_system(rng, rng.randint(1, 5))
        sys = gen.embed_liar(rng, base).merge(T.SentenceSystem({}, {"zeta": False}))
        val, witness = T.lp_model(sys)
        assert witness is not None
        assert T.lp_satisfies(sys, val)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 7))
def test_kripke_stage_bound_and_ascending(seed, n):
    sys = gen.random_sentence_system(random.Random(seed), n)
    res = T.kripke_lfp(sys)
    assert len(res.stages) <= 2 * len(sys.names) + 1
    assert all(T.valuation_le(a, b) for a, b in zip(res.stages, res.stages[1:]))
    assert T.jump(sys, res.valuation) == res.valuation


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 7))
def test_classical_search_is_first_model(seed, n):
    sys = gen.random_sentence_system(random.Random(seed), n)
    models = all_classical_models(sys)
    found = T.total_classical_search(sys)
    if not models:
        assert found is None
    else:
        # first in name order, False before True
        names = sys.names
        first = min(models, key=lambda w: [w[k] for k in names])
        assert found == first


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_lp_model_is_an_lp_model(seed, n):
    rng = random.Random(seed)
    sys = gen.random_sentence_system(rng, n)
    val, _ = T.lp_model(sys)
    assert T.lp_satisfies(sys, val)
    assert set(val.designated_true) | set(val.designated_false) == set(sys.names)
