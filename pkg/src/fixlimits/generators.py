"""Seeded random instances for property suites and the CLI ``suite`` kind.

Every generator takes a ``random.Random`` so a single seed reproduces an
entire suite.
"""
from __future__ import annotations

import random
from typing import Optional

from . import mucalc as mu
from . import truth as tr
from .lattice import Operator, Universe
from .optimize import AccountabilityModel, RiskModel


def item_names(n: int) -> tuple:
    return tuple(f"i{k}" for k in range(n))


def random_policy(rng: random.Random, n_items: int, n_rules: Optional[int] = None,
                  inflationary: bool = True) -> Operator:
    items = item_names(n_items)
    if n_rules is None:
        n_rules = rng.randint(1, max(1, n_items))
    rules = []
    for _ in range(n_rules):
        k = rng.choices((0, 1, 2), weights=(1, 4, 3))[0]
        prem = rng.sample(items, min(k, n_items))
        concl = rng.sample(items, rng.randint(1, min(2, n_items)))
        rules.append((tuple(prem), tuple(concl)))
    return Operator(Universe(items), tuple(rules), inflationary)


def garble(op: Operator, rng: random.Random) -> Operator:
    """Coarsen a rule policy by dropping rules and conclusions."""
    rules = []
    for prem, concl in op.rules:
        roll = rng.random()
        if roll < 0.25:
            continue
        if roll < 0.5 and len(concl) > 1:
            concl = frozenset(rng.sample(sorted(concl), len(concl) - 1))
        rules.append((prem, concl))
    return Operator(op.universe, tuple(rules), op.inflationary)


def random_risk_model(rng: random.Random, items, pair_prob: float = 0.2) -> RiskModel:
    items = tuple(items)

    def scores():
        return {i: round(rng.uniform(0, 1), 3) for i in items}

    pairs = {}
    for a_idx, a in enumerate(items):
        for b in items[a_idx + 1:]:
            if rng.random() < pair_prob:
                pairs[(a, b)] = round(rng.uniform(0, 1), 3)
    return RiskModel(items, alpha=round(rng.uniform(0.5, 2), 3), beta=round(rng.uniform(0, 1), 3),
                     gamma=round(rng.uniform(0, 1), 3), delta=round(rng.uniform(0, 1), 3),
                     pi=scores(), lam=scores(), phi=scores(), g=scores(), pairs=pairs)


def random_accountability(rng: random.Random, items) -> AccountabilityModel:
    return AccountabilityModel({i: float(rng.randint(0, 5)) for i in items})


# -- sentence systems ----------------------------------------------------------

def _random_sentence(rng, names, depth):
    if depth == 0 or rng.random() < 0.3:
        return tr.Trans(rng.choice(names)) if rng.random() < 0.6 else tr.Ref(rng.choice(names))
    kind = rng.choice(("not", "and", "or", "implies", "iff"))
    if kind == "not":
        return tr.Not(_random_sentence(rng, names, depth - 1))
    cls = {"and": tr.And, "or": tr.Or, "implies": tr.Implies, "iff": tr.Iff}[kind]
    return cls(_random_sentence(rng, names, depth - 1), _random_sentence(rng, names, depth - 1))


def random_sentence_system(rng: random.Random, n_names: int, n_ground: Optional[int] = None,
                           depth: int = 2) -> tr.SentenceSystem:
    names = [f"s{k}" for k in range(n_names)]
    if n_ground is None:
        n_ground = rng.randint(0, max(0, n_names // 2))
    ground = {n: rng.random() < 0.5 for n in names[:n_ground]}
    defs = {n: _random_sentence(rng, names, depth) for n in names[n_ground:]}
    return tr.SentenceSystem(defs, ground)


def embed_liar(rng: random.Random, sys: tr.SentenceSystem, liar: str = "L") -> tr.SentenceSystem:
    """Add ``L := not trans(L)`` plus, sometimes, sentences that mention L."""
    defs = dict(sys.definitions)
    defs[liar] = tr.Not(tr.Trans(liar))
    for n in sorted(defs):
        if n != liar and rng.random() < 0.3:
            defs[n] = tr.Or(defs[n], tr.Trans(liar)) if rng.random() < 0.5 else tr.And(defs[n], tr.Not(tr.Ref(liar)))
    return tr.SentenceSystem(defs, dict(sys.ground))


# -- mu-calculus ---------------------------------------------------------------

def random_frame(rng: random.Random, n_states: int, props=("p", "q"), edge_prob: float = 0.35) -> mu.KripkeFrame:
    states = tuple(f"w{k}" for k in range(n_states))
    edges = {(a, b) for a in states for b in states if rng.random() < edge_prob}
    labeling = {p: {s for s in states if rng.random() < 0.5} for p in props}
    return mu.KripkeFrame(states, edges, labeling)


def random_mu_formula(rng: random.Random, depth: int, props=("p", "q"), max_alternation: int = 2):
    """Positive formula in negation normal form, depth <= ``depth``.

    ``max_alternation`` bounds the number of mu/nu switches along any path.
    """
    var_names = ("X", "Y", "Z", "U")

    def gen(d, bound, last, switches):
        leaves = [lambda: mu.Prop(rng.choice(props)), lambda: mu.Not(mu.Prop(rng.choice(props))),
                  lambda: mu.Top(), lambda: mu.Bottom()]
        if bound:
            leaves += [lambda: mu.Var(rng.choice(bound))] * 3
        if d == 0 or rng.random() < 0.2:
            return rng.choice(leaves)()
        choices = ["and", "or", "box", "dia"]
        if len(bound) < len(var_names):
            for kind in ("mu", "nu"):
                if last is None or kind == last or switches < max_alternation:
                    choices += [kind, kind]
        kind = rng.choice(choices)
        if kind in ("mu", "nu"):
            v = var_names[len(bound)]
            sw = switches + (last is not None and kind != last)
            body = gen(d - 1, bound + [v], kind, sw)
            return (mu.Mu if kind == "mu" else mu.Nu)(v, body)
        if kind in ("box", "dia"):
            return (mu.Box if kind == "box" else mu.Diamond)(gen(d - 1, bound, last, switches))
        cls = mu.And if kind == "and" else mu.Or
        return cls(gen(d - 1, bound, last, switches), gen(d - 1, bound, last, switches))

    return gen(depth, [], None, 0)


def random_modal_formula(rng: random.Random, depth: int, props=("p", "q")):
    if depth == 0 or rng.random() < 0.25:
        return mu.Prop(rng.choice(props))
    kind = rng.choice(("not", "and", "or", "implies", "box", "dia"))
    if kind == "not":
        return mu.Not(random_modal_formula(rng, depth - 1, props))
    if kind in ("box", "dia"):
        return (mu.Box if kind == "box" else mu.Diamond)(random_modal_formula(rng, depth - 1, props))
    cls = {"and": mu.And, "or": mu.Or, "implies": mu.Implies}[kind]
    return cls(random_modal_formula(rng, depth - 1, props), random_modal_formula(rng, depth - 1, props))


def random_best_response(rng: random.Random, universe: Universe) -> dict:
    n = universe.size
    table = {}
    for m in range(1 << n):
        picks = {rng.getrandbits(n) for _ in range(rng.randint(1, 3))}
        table[universe.members(m)] = {universe.members(p) for p in picks}
    return table
