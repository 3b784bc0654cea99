"""Disclosure design calculus over powerset lattices.

Risk is ``alpha*Pi + beta*Lam + gamma*Phi + delta*(G + pair interactions)``
with per-item non-negative scores, so it is monotone by construction.
Accountability is an additive gain capped at an optional saturation level.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Union

from .errors import CapacityError, DomainError, FuelError, MonotonicityError
from .lattice import ORACLE_BOUND, Operator, Universe, fixpoint_masks, lfp, post_fixed_masks

TOL = 1e-9
LAWVERE_BOUND = 4


def _nonneg(name, mapping):
    for k, v in mapping.items():
        if v < 0 or not math.isfinite(v):
            raise DomainError(f"{name}[{k!r}] = {v} must be a finite non-negative number")


@dataclass(frozen=True)
class RiskModel:
    items: tuple
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    delta: float = 1.0
    pi: Mapping[str, float] = field(default_factory=dict)
    lam: Mapping[str, float] = field(default_factory=dict)
    phi: Mapping[str, float] = field(default_factory=dict)
    g: Mapping[str, float] = field(default_factory=dict)
    pairs: Mapping[frozenset, float] = field(default_factory=dict)
    _item_weight: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        items = tuple(self.items)
        object.__setattr__(self, "items", items)
        known = set(items)
        _nonneg("weights", {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "delta": self.delta})
        for label in ("pi", "lam", "phi", "g"):
            table = dict(getattr(self, label))
            _nonneg(label, table)
            if set(table) - known:
                raise DomainError(f"{label} scores name unknown items {sorted(set(table) - known)}")
            object.__setattr__(self, label, table)
        pairs = {}
        for key, w in dict(self.pairs).items():
            pair = frozenset(key)
            if len(pair) != 2 or not pair <= known:
                raise DomainError(f"pair interaction {sorted(pair)} must name two known items")
            pairs[pair] = pairs.get(pair, 0.0) + w
        _nonneg("pairs", {tuple(sorted(k)): v for k, v in pairs.items()})
        object.__setattr__(self, "pairs", pairs)
        weight = {i: self.alpha * self.pi.get(i, 0.0) + self.beta * self.lam.get(i, 0.0)
                  + self.gamma * self.phi.get(i, 0.0) + self.delta * self.g.get(i, 0.0) for i in items}
        object.__setattr__(self, "_item_weight", weight)

    @classmethod
    def uniform(cls, items, value: float = 1.0) -> "RiskModel":
        """Unit weights with a single ``Pi`` score per item."""
        items = tuple(items)
        return cls(items, pi={i: value for i in items}, beta=0.0, gamma=0.0, delta=0.0)


def risk(x: Iterable[str], model: RiskModel) -> float:
    x = frozenset(x)
    unknown = x - set(model.items)
    if unknown:
        raise DomainError(f"unknown items {sorted(unknown)}")
    total = 0.0
    for i in model.items:
        if i in x:
            total += model._item_weight[i]
    for pair in sorted(model.pairs, key=sorted):
        if pair <= x:
            total += model.delta * model.pairs[pair]
    return total


@dataclass(frozen=True)
class AccountabilityModel:
    gains: Mapping[str, float]
    cap: Optional[float] = None

    def __post_init__(self):
        _nonneg("gains", dict(self.gains))
        if self.cap is not None and self.cap < 0:
            raise DomainError("cap must be non-negative")
        object.__setattr__(self, "gains", dict(self.gains))

    def __call__(self, x: Iterable[str]) -> float:
        total = sum(self.gains.get(i, 0.0) for i in sorted(x))
        return total if self.cap is None else min(self.cap, total)


@dataclass(frozen=True)
class GainModel:
    utilities: Mapping[str, float]
    weight: float = 0.0

    def __post_init__(self):
        _nonneg("utilities", dict(self.utilities))
        object.__setattr__(self, "utilities", dict(self.utilities))

    def __call__(self, x: Iterable[str]) -> float:
        return sum(self.utilities.get(i, 0.0) for i in sorted(x))


def _order(u: Universe, x) -> list:
    return [i for i in u.items if i in x]


# -- least fixed point minimises risk --------------------------------------

def least_risk_fixedpoint_check(op: Operator, model: RiskModel, fuel: int = 1000, bound: int = ORACLE_BOUND,
                                accountability: AccountabilityModel | None = None, A0: float = 0.0) -> dict:
    """lfp is below every fixed point, hence no riskier than any of them.

    With an accountability model, the only corollary checked is the one
    that holds for monotone A: if the lfp already meets ``A0`` it is the
    least-risk feasible fixed point.
    """
    res = lfp(op, fuel)
    if not res.converged:
        raise FuelError("least fixed point did not converge within fuel")
    u = op.universe
    lmask = u.mask(res.value)
    r0 = risk(res.value, model)
    fps = []
    subset_ok = risk_ok = True
    for m in fixpoint_masks(op, bound):
        members = u.members(m)
        r = risk(members, model)
        below = lmask & ~m == 0
        subset_ok &= below
        risk_ok &= r0 <= r + TOL
        fps.append({"state": _order(u, members), "risk": r})
    report = {
        "lfp": _order(u, res.value), "lfp_risk": r0, "fixed_points": fps,
        "lfp_is_least": subset_ok, "lfp_risk_minimal": risk_ok, "passed": subset_ok and risk_ok,
    }
    if accountability is not None:
        feasible = [f for f in fps if accountability(f["state"]) >= A0 - TOL]
        applies = accountability(res.value) >= A0 - TOL
        report["corollary_applies"] = applies
        report["corollary_holds"] = (not applies) or all(r0 <= f["risk"] + TOL for f in feasible)
        report["passed"] = report["passed"] and report["corollary_holds"]
    return report


# -- greedy ------------------------------------------------------------------

@dataclass
class GreedyResult:
    state: frozenset
    status: str
    trace: list
    accountability: float
    risk: float

    @property
    def feasible(self) -> bool:
        return self.status == "ok"

    def as_dict(self, universe: Universe) -> dict:
        return {"state": _order(universe, self.state), "status": self.status, "accountability": self.accountability,
                "risk": self.risk, "trace": self.trace}


def _ratio_key(name, dA, dR):
    ratio = math.inf if dR <= TOL else dA / dR
    return (-ratio, -dA, name)


def greedy_min_transparency(op: Operator, A: AccountabilityModel, A0: float, model: RiskModel,
                            fuel: int = 1000) -> GreedyResult:
    """Apply the policy, and while accountability is short add the item with
    the best marginal accountability per marginal risk.

    Each round computes ``X <- X | T(X)`` so force-added items are kept;
    the loop stops once a round changes nothing, at which point
    ``T(X) <= X`` and ``A(X) >= A0``.  Zero marginal risk ranks as an
    infinite ratio; ties go to the larger A-gain, then to the item name.
    """
    if A0 < 0:
        raise DomainError("A0 must be non-negative")
    u = op.universe
    top_a = A(u.top)
    if top_a < A0 - TOL:
        return GreedyResult(frozenset(), "infeasible", [{"reason": f"A(top) = {top_a} < A0 = {A0}"}],
                            top_a, risk(u.top, model))
    x = 0
    trace = []
    for step in range(1, fuel + 1):
        nxt = x | op.step(x)
        added = None
        a_now = A(u.members(nxt))
        if a_now < A0 - TOL:
            members = u.members(nxt)
            r_now = risk(members, model)
            cands = []
            for k, name in enumerate(u.items):
                if nxt >> k & 1:
                    continue
                grown = members | {name}
                cands.append((_ratio_key(name, A(grown) - a_now, risk(grown, model) - r_now), k))
            if not cands:
                return GreedyResult(u.members(nxt), "infeasible", trace, a_now, risk(members, model))
            _, k = min(cands)
            nxt |= 1 << k
            added = u.items[k]
        state = u.members(nxt)
        trace.append({"step": step, "state": _order(u, state), "added": added,
                      "accountability": A(state), "risk": risk(state, model)})
        if nxt == x:
            return GreedyResult(state, "ok", trace, A(state), risk(state, model))
        x = nxt
    state = u.members(x)
    return GreedyResult(state, "fuel_exhausted", trace, A(state), risk(state, model))


def brute_force_optimum(op: Operator, A: AccountabilityModel, A0: float, model: RiskModel,
                        lam: float = 0.0, gain: GainModel | None = None, bound: int = ORACLE_BOUND):
    """Least Lagrangian objective over post-fixed states meeting ``A0``
    (ties to the earliest mask); None when nothing is feasible."""
    u = op.universe
    best = None
    for m in post_fixed_masks(op, bound):
        x = u.members(m)
        if A(x) < A0 - TOL:
            continue
        val = _objective(x, model, lam, gain)
        if best is None or val < best[0] - TOL:
            best = (val, x)
    return best


def _objective(x, model, lam, gain):
    return risk(x, model) - (lam * gain(x) if gain is not None else 0.0)


@dataclass(frozen=True)
class DualReport:
    eta: float
    slack: float
    slackness_product: float
    binding: bool
    stationary: bool
    violations: tuple = ()

    @property
    def passed(self) -> bool:
        return self.slackness_product <= TOL and self.stationary

    def as_dict(self) -> dict:
        return {"eta": self.eta, "slack": self.slack, "slackness_product": self.slackness_product,
                "binding": self.binding, "stationary": self.stationary, "violations": list(self.violations)}


def kkt_report(x_star: Iterable[str], op: Operator, A: AccountabilityModel, A0: float, model: RiskModel,
               lam: float = 0.0, gain: GainModel | None = None) -> DualReport:
    """Single-move dual estimate for ``min L(x)`` subject to ``A(x) >= A0``.

    Neighbours are ``x`` with one item added or removed that remain
    feasible: post-fixed (``T(y) <= y``) and ``A(y) >= A0``.  ``eta`` is the
    least non-negative value with ``L(x) + eta*(A0 - A(x)) <= L(y) +
    eta*(A0 - A(y))`` for every such neighbour.  An improving neighbour that
    no ``eta`` can absorb (it does not lower A) is a stationarity violation.
    """
    u = op.universe
    x = u.element(x_star)
    a_x = A(x)
    l_x = _objective(x, model, lam, gain)
    eta = 0.0
    violations = []
    for name in u.items:
        y = x - {name} if name in x else x | {name}
        ym = u.mask(y)
        if op.step(ym) & ~ym:
            continue
        a_y = A(y)
        if a_y < A0 - TOL:
            continue
        d = l_x - _objective(y, model, lam, gain)
        a = a_x - a_y
        if d <= TOL:
            continue
        if a > TOL:
            eta = max(eta, d / a)
        else:
            violations.append(_order(u, y))
    slack = A0 - a_x
    product = eta * slack
    return DualReport(eta, slack, abs(product), abs(a_x - A0) <= TOL, not violations, tuple(map(tuple, violations)))


# -- coarsening --------------------------------------------------------------

def _coarser_witness(fine: Operator, coarse: Operator, bound: int):
    if fine.universe != coarse.universe:
        raise DomainError("operators must share a universe")
    n = fine.universe.size
    if n > bound:
        raise CapacityError(f"universe of {n} items exceeds the scan bound {bound}")
    for m in range(1 << n):
        extra = coarse.step(m) & ~fine.step(m)
        if extra:
            return m, extra
    return None


def garble_compare(T1: Operator, T2: Operator, model: RiskModel, A: AccountabilityModel | None = None,
                   A0: float = 0.0, fuel: int = 1000, bound: int = ORACLE_BOUND) -> dict:
    """``T2`` is a garbling of ``T1`` when ``T2(x) <= T1(x)`` everywhere; then
    its least fixed point is smaller and no riskier."""
    u = T1.universe
    witness = _coarser_witness(T1, T2, bound)
    if witness is not None:
        m, extra = witness
        return {"hypothesis_holds": False,
                "witness": {"state": u.sorted_members(m), "extra": u.sorted_members(extra)},
                "passed": False}
    r1, r2 = lfp(T1, fuel), lfp(T2, fuel)
    if not (r1.converged and r2.converged):
        raise FuelError("least fixed point did not converge within fuel")
    x1, x2 = r1.value, r2.value
    risk1, risk2 = risk(x1, model), risk(x2, model)
    out = {
        "hypothesis_holds": True,
        "x1": _order(u, x1), "x2": _order(u, x2), "risk1": risk1, "risk2": risk2,
        "x2_subset_x1": x2 <= x1, "risk_le": risk2 <= risk1 + TOL,
    }
    if A is not None:
        out["feasible1"] = A(x1) >= A0 - TOL
        out["feasible2"] = A(x2) >= A0 - TOL
    out["passed"] = out["x2_subset_x1"] and out["risk_le"]
    return out


def process_outcome_compare(T_proc: Operator, T_out: Operator, model: RiskModel, **kw) -> dict:
    """Outcome transparency as a garbling of process transparency."""
    rep = garble_compare(T_proc, T_out, model, **kw)
    renamed = {"x1": "process_lfp", "x2": "outcome_lfp", "risk1": "process_risk", "risk2": "outcome_risk",
               "x2_subset_x1": "outcome_subset_process", "risk_le": "outcome_no_riskier"}
    return {renamed.get(k, k): v for k, v in rep.items()}


# -- equilibria --------------------------------------------------------------

BestResponse = Union[Mapping[frozenset, Iterable[frozenset]], Callable[[frozenset], Iterable[frozenset]]]


def _responses(B: BestResponse, x: frozenset) -> set:
    if callable(B):
        out = B(x)
    else:
        if x not in B:
            raise DomainError(f"best-response table has no entry for {sorted(x)}")
        out = B[x]
    out = {frozenset(y) for y in out}
    if not out:
        raise DomainError(f"best response at {sorted(x)} is empty")
    return out


def equilibrium_enumerate(op: Operator, B: BestResponse, bound: int = ORACLE_BOUND) -> set[frozenset]:
    """``{x : x in B(T(x))}`` by a full scan."""
    u = op.universe
    if u.size > bound:
        raise CapacityError(f"universe of {u.size} items exceeds the scan bound {bound}")
    found = set()
    for m in range(1 << u.size):
        x = u.members(m)
        if x in _responses(B, u.members(op.step(m))):
            found.add(x)
    return found


# -- Lawvere / Cantor ---------------------------------------------------------

def lawvere_check(n: int, e: Mapping[int, tuple] | Callable[[int], tuple]) -> dict:
    """Finite instance of the diagonal argument on ``X = range(n)``.

    ``e(x)`` is a self-map of X written as a tuple ``(f(0), ..., f(n-1))``.
    """
    if not 1 <= n <= LAWVERE_BOUND:
        raise CapacityError(f"n must lie in 1..{LAWVERE_BOUND}")
    get = e if callable(e) else (lambda x: e[x])
    maps = {}
    for x in range(n):
        f = tuple(get(x))
        if len(f) != n or any(not (0 <= v < n) for v in f):
            raise DomainError(f"e({x}) = {f} is not a self-map of range({n})")
        maps[x] = f
    image = set(maps.values())
    surjective = len(image) == n ** n
    report = {"n": n, "image_size": len(image), "self_maps": n ** n, "surjective": surjective}
    if surjective:
        endos = list(itertools.product(range(n), repeat=n))
        report["every_endomap_has_fixed_point"] = all(any(f[x] == x for x in range(n)) for f in endos)
        report["passed"] = report["every_endomap_has_fixed_point"]
        return report
    diagonal = tuple((maps[x][x] + 1) % n for x in range(n))
    report["diagonal"] = list(diagonal)
    report["diagonal_outside_image"] = diagonal not in image
    free = tuple((x + 1) % n for x in range(n)) if n >= 2 else None
    report["fixed_point_free_endomap"] = list(free) if free else None
    report["passed"] = report["diagonal_outside_image"]
    return report


# -- small calculators ---------------------------------------------------------

def breach_bound(coverage: float) -> float:
    if not 0.0 <= coverage <= 1.0:
        raise DomainError(f"coverage {coverage} outside [0, 1]")
    return 1.0 - coverage


def risk_sequence(op: Operator, model: RiskModel, fuel: int = 1000) -> list[float]:
    res = lfp(op, fuel)
    if not res.converged:
        raise FuelError("least fixed point did not converge within fuel")
    return [risk(x, model) for x in res.trace]


def iterative_risk_convergence(op: Operator, model: RiskModel, eps: float, fuel: int = 1000) -> int:
    """Least k with ``risk(T^k(bottom)) >= risk(lfp) - eps``."""
    if eps < 0:
        raise DomainError("eps must be non-negative")
    seq = risk_sequence(op, model, fuel)
    for a, b in zip(seq, seq[1:]):
        if b < a - TOL:
            raise MonotonicityError("risk decreased along the Kleene chain")
    target = seq[-1] - eps
    return next(k for k, r in enumerate(seq) if r >= target - TOL)


def stratify_compare(I1: Iterable[str], I2: Iterable[str], model: RiskModel) -> dict:
    I1, I2 = frozenset(I1), frozenset(I2)
    if I1 & I2:
        raise DomainError(f"phases overlap on {sorted(I1 & I2)}")
    r1, r2, r12 = risk(I1, model), risk(I2, model), risk(I1 | I2, model)
    gap = r12 - r1 - r2
    return {"risk_first": r1, "risk_second": r2, "risk_combined": r12, "marginal_second": r12 - r1,
            "gap": gap, "superadditive": gap > TOL}


def _interp(points: list, level: float) -> float:
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if x0 <= level <= x1:
            return y0 if x1 == x0 else y0 + (y1 - y0) * (level - x0) / (x1 - x0)
    raise DomainError(f"level {level} outside the supplied range")


def mixture_gaming_eval(g_values: Iterable[tuple], p: float, forms: tuple | None = None,
                        g_fn: Callable[[float], float] | None = None) -> dict:
    """Jensen gap ``p*G(hi) + (1-p)*G(lo) - G(p*hi + (1-p)*lo)``.

    ``g_values`` are ``(precision level, G score)`` points and G between
    them is linear, unless ``g_fn`` gives G directly (then only the levels
    of ``g_values`` are used).  ``forms`` picks the two mixed levels
    (default: lowest and highest); ``p`` is the probability of the second.
    """
    pts = sorted((float(a), float(b)) for a, b in g_values)
    if len(pts) < 2:
        raise DomainError("need at least two precision levels")
    if len({a for a, _ in pts}) != len(pts):
        raise DomainError("precision levels must be distinct")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability {p} outside [0, 1]")
    if g_fn is not None:
        pts = [(a, float(g_fn(a))) for a, _ in pts]
        G = g_fn
    else:
        def G(level):
            return _interp(pts, level)
    lo, hi = forms if forms is not None else (pts[0][0], pts[-1][0])
    for level in (lo, hi):
        if not pts[0][0] <= level <= pts[-1][0]:
            raise DomainError(f"form level {level} outside the supplied range")
    expected = (1 - p) * G(lo) + p * G(hi)
    mean_level = (1 - p) * lo + p * hi
    at_mean = float(G(mean_level))
    slopes = [(y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(pts, pts[1:])]
    convex = all(b >= a - TOL for a, b in zip(slopes, slopes[1:]))
    gap = expected - at_mean
    return {"expected_g": expected, "mean_level": mean_level, "g_at_mean": at_mean, "gap": gap,
            "convex": convex, "gap_nonnegative": gap >= -TOL}
