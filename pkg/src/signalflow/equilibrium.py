"""Best-response checks, sufficient equilibrium conditions, threshold search.

The sufficient conditions for a switched-effort equilibrium come in two
forms: value-based (six inequalities on the solved continuation values)
and primitive-based (the values replaced by closed forms and bounds, so
only model primitives enter).  Each check returns an
:class:`EquilibriumReport` with one record per condition; failures are
data, never exceptions.

Condition labels (a)-(f) are shared across the checks:

  a  the good type wants full effort everywhere under scrutiny
  b  the bad type wants zero effort everywhere under scrutiny
  c  the good type wants zero effort in the switched region
  d  the bad type's switched-region motive stays below full effort
  e  ... and above the effort whose jump just reaches the scrutiny region
  f  jumps from the top of the scrutiny region land in pooling
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import product

import numpy as np

from .model import (
    BAD,
    GOOD,
    INF,
    TYPES,
    BenefitFn,
    CostPair,
    ModelParams,
    jump_target,
)
from .strategy import RegionKind, StrategyProfile
from .values import (
    ConstructionFailure,
    GridSpec,
    ScrutinyValues,
    StasisValues,
    SwitchedSolveResult,
    ValueTable,
    _best_flow_gain,
    scrutiny_limit,
    switched_value_solve,
)

WEAK_GRACE = 1e-12   # weak inequalities tolerate this much numerical slack
STRICT_MARGIN = 1e-9  # strict inequalities must clear this much


class CornerResponse(Enum):
    ZERO = "zero"
    ONE = "one"
    INTERIOR = "interior"


@dataclass(frozen=True)
class Condition:
    """One sufficient-condition record: left op right with margin = slack."""

    label: str
    description: str
    left: float
    right: float
    margin: float
    strict: bool
    passed: bool
    note: str = ""


@dataclass
class EquilibriumReport:
    family: str
    conditions: list[Condition]
    extrema: dict[str, float] = field(default_factory=dict)
    verdict: str = "fail"  # "pass" | "fail" | "not-applicable"
    n_star: float | None = None
    width_bound: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def min_margin(self) -> float:
        if not self.conditions:
            return math.nan
        return min(c.margin for c in self.conditions)

    def condition(self, label: str) -> Condition:
        for c in self.conditions:
            if c.label == label:
                return c
        raise KeyError(label)


def _make_condition(label, description, left, right, kind, note="") -> Condition:
    """kind: 'ge' (left >= right), 'le' (left <= right); strict variants 'gt', 'lt'."""
    if kind in ("ge", "gt"):
        margin = left - right
    else:
        margin = right - left
    strict = kind in ("gt", "lt")
    passed = margin > STRICT_MARGIN if strict else margin >= -WEAK_GRACE
    return Condition(label, description, left, right, margin, strict, passed, note)


def _verdict(conditions: list[Condition]) -> str:
    return "pass" if all(c.passed for c in conditions) else "fail"


def corner_best_response(
    table: ValueTable,
    l: float,
    profile: StrategyProfile,
    params: ModelParams,
    costs: CostPair,
    type_tag: str,
) -> CornerResponse:
    """Corner classification of the sender's best response at ``l``.

    Zero effort is optimal when the jump-avoidance motive
    ``lam * (V(l) - V(j(l)))`` is below the marginal cost at zero, full
    effort when it is above the marginal cost at one; otherwise interior.
    """
    e_good, e_bad = profile.efforts(l)
    j = jump_target(l, e_good, e_bad, params)
    gap = params.lam * (table.value(l, type_tag) - table.value(j, type_tag))
    cost = costs.for_type(type_tag)
    if gap <= cost.marginal(0.0):
        return CornerResponse.ZERO
    if gap >= cost.marginal(1.0):
        return CornerResponse.ONE
    return CornerResponse.INTERIOR


def _landing_effort_bound(l_under, l1, params) -> tuple[float, str]:
    """Smallest effort whose jump from the switched region reaches l1, clamped to [0, 1]."""
    raw = 1.0 - params.d_bad / params.lam - (
        (params.lam + params.d_good) / params.lam
    ) * math.exp(l_under - l1)
    if raw < 0.0:
        return 0.0, f"effort bound {raw:.6g} clamped to 0"
    if raw > 1.0:
        return 1.0, f"effort bound {raw:.6g} clamped to 1"
    return raw, ""


def _scrutiny_jump_shift(params: ModelParams) -> float:
    if params.d_good == 0.0:
        return -INF
    return math.log(params.d_good / (params.lam + params.d_bad))


def check_value_conditions(
    profile: StrategyProfile,
    table: ValueTable,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
) -> EquilibriumReport:
    """Six value-based sufficient conditions for the canonical switched shape.

    Region extrema are taken over the solver grid with endpoint limits (the
    scrutiny value is increasing, so its extrema sit at the ends).  With no
    switched region, only the scrutiny-region conditions (a) and (b) apply,
    which is the extremal-effort case; with neither region the report is
    not-applicable.
    """
    scr = profile.scrutiny_region()
    sw = profile.switched_region()
    if scr is None and sw is None:
        return EquilibriumReport(
            family="value", conditions=[], verdict="not-applicable",
            details={"reason": "no switched or scrutiny region"},
        )
    if scr is None or table.scrutiny is None:
        return EquilibriumReport(
            family="value", conditions=[], verdict="not-applicable",
            details={"reason": "no scrutiny region to anchor jump incentives"},
        )
    r, lam = params.r, params.lam
    l1, l_over = scr.lower, scr.upper
    shift = _scrutiny_jump_shift(params)
    evaluator = table.scrutiny

    # scrutiny-region gap V_theta(l) - beta(j(l)) / r over a dense grid + limit
    nodes = evaluator.nodes
    stride = max(1, len(nodes) // 4000)
    ls = nodes[::stride]
    beta_j = np.array([benefit.beta_min if shift == -INF else benefit(float(z) + shift) for z in ls])
    gap_good = np.array([evaluator.value(float(z), GOOD) for z in ls]) - beta_j / r
    gap_bad = np.array([evaluator.value(float(z), BAD) for z in ls]) - beta_j / r
    inf_gap_good = float(np.min(gap_good))
    sup_gap_bad = float(np.max(gap_bad))
    if math.isinf(l_over):
        beta_j_inf = benefit.beta_min if shift == -INF else benefit.beta_max
        inf_gap_good = min(inf_gap_good, evaluator.limit(GOOD) - beta_j_inf / r)
        sup_gap_bad = max(sup_gap_bad, evaluator.limit(BAD) - beta_j_inf / r)

    v1_low = {tag: evaluator.value(l1, tag) for tag in TYPES}
    if math.isinf(l_over):
        v1_high = {tag: evaluator.limit(tag) for tag in TYPES}
    else:
        v1_high = {tag: benefit(l_over) / r for tag in TYPES}

    conditions = [
        _make_condition(
            "a", "good type holds full effort under scrutiny",
            inf_gap_good, costs.good.marginal(1.0) / lam, "ge",
        ),
        _make_condition(
            "b", "bad type stays idle under scrutiny",
            sup_gap_bad, costs.bad.marginal(0.0) / lam, "le",
        ),
    ]
    extrema = {
        "v_scrutiny_inf_good": v1_low[GOOD],
        "v_scrutiny_inf_bad": v1_low[BAD],
        "v_scrutiny_sup_good": v1_high[GOOD],
        "v_scrutiny_sup_bad": v1_high[BAD],
    }

    if sw is not None:
        if table.switched_l is None:
            raise ValueError("value table lacks the switched-region solution")
        sup_sw = {GOOD: float(np.max(table.switched_v_good)), BAD: float(np.max(table.switched_v_bad))}
        inf_sw = {GOOD: float(np.min(table.switched_v_good)), BAD: float(np.min(table.switched_v_bad))}
        extrema.update(
            v_switched_sup_good=sup_sw[GOOD], v_switched_sup_bad=sup_sw[BAD],
            v_switched_inf_good=inf_sw[GOOD], v_switched_inf_bad=inf_sw[BAD],
        )
        l_under = sw.lower
        e_hat, clamp_note = _landing_effort_bound(l_under, l1, params)
        conditions.append(
            _make_condition(
                "c", "good type stays idle in the switched region",
                sup_sw[GOOD] - v1_low[GOOD], costs.good.marginal(0.0) / lam, "le",
            )
        )
        conditions.append(
            _make_condition(
                "d", "bad type's switched motive stays below full effort",
                sup_sw[BAD] - v1_high[BAD], costs.bad.marginal(1.0) / lam, "lt",
            )
        )
        conditions.append(
            _make_condition(
                "e", "bad type's switched motive clears the scrutiny-landing effort",
                inf_sw[BAD] - v1_low[BAD], costs.bad.marginal(e_hat) / lam, "ge",
                note=clamp_note,
            )
        )
        limit_jump = l_over + shift if math.isfinite(l_over) else (
            -INF if shift == -INF else INF
        )
        conditions.append(
            _make_condition(
                "f", "jumps from the top of scrutiny land at or below the lower threshold",
                limit_jump, l_under, "le",
            )
        )

    report = EquilibriumReport(
        family="value",
        conditions=conditions,
        extrema=extrema,
        verdict=_verdict(conditions),
    )
    bound = scrutiny_bounds(params, benefit, costs)
    report.n_star = bound.n_star
    report.width_bound = bound.width_bound
    return report


def check_primitive_conditions(
    l_under: float,
    l1: float,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
) -> EquilibriumReport:
    """Primitive-only sufficient conditions for the zero-baseline model.

    Requires d = 0; the scrutiny region is then unbounded above, the
    closed-form values at l1 replace the region extrema and the pooled
    value at the lower threshold bounds the switched-region values.
    """
    if not (params.symmetric and params.d == 0.0):
        raise ValueError("primitive conditions require the symmetric model with d = 0")
    r, lam = params.r, params.lam
    evaluator = ScrutinyValues(l1, INF, params, benefit, costs)
    i_good = evaluator.value(l1, GOOD)
    i_bad = evaluator.value(l1, BAD)
    top_bad = benefit.beta_max / (r + lam) + lam * benefit.beta_min / (r * (r + lam))
    pooled_under = benefit(l_under) / r
    e_hat, clamp_note = _landing_effort_bound(l_under, l1, params)

    conditions = [
        _make_condition(
            "a", "good type holds full effort under scrutiny",
            i_good - benefit.beta_min / r, costs.good.marginal(1.0) / lam, "ge",
        ),
        _make_condition(
            "b", "bad type stays idle under scrutiny",
            top_bad - benefit.beta_min / r, costs.bad.marginal(0.0) / lam, "le",
        ),
        _make_condition(
            "c", "good type stays idle in the switched region",
            pooled_under - i_good, costs.good.marginal(0.0) / lam, "lt",
        ),
        _make_condition(
            "d", "bad type's switched motive stays below full effort",
            pooled_under - top_bad, costs.bad.marginal(1.0) / lam, "lt",
        ),
        _make_condition(
            "e", "bad type's switched motive clears the scrutiny-landing effort",
            pooled_under - i_bad, costs.bad.marginal(e_hat) / lam, "gt",
            note=clamp_note,
        ),
    ]
    return EquilibriumReport(
        family="primitive-d0",
        conditions=conditions,
        extrema={"v_scrutiny_inf_good": i_good, "v_scrutiny_inf_bad": i_bad,
                 "v_scrutiny_sup_bad": top_bad, "pooled_lower": pooled_under},
        verdict=_verdict(conditions),
    )


def check_primitive_conditions_bounded(
    l_under: float,
    l1: float,
    l_over: float,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
) -> EquilibriumReport:
    """Primitive sufficient conditions with a positive baseline rate.

    Requires d > 0 and a finite scrutiny cutoff whose jumps clear the
    lower threshold; values over [l1, l_over] come from the closed forms
    with value matching at the cutoff.
    """
    if not params.symmetric or params.d <= 0.0:
        raise ValueError("bounded primitive conditions require the symmetric model with d > 0")
    if not math.isfinite(l_over):
        raise ValueError("bounded primitive conditions require a finite scrutiny cutoff")
    r, lam, d = params.r, params.lam, params.d
    shift = math.log(d / (lam + d))
    evaluator = ScrutinyValues(l1, l_over, params, benefit, costs)
    ls = np.linspace(l1, l_over, 801)
    beta_j = np.array([benefit(float(z) + shift) for z in ls])
    gap_good = np.array([evaluator.value(float(z), GOOD) for z in ls]) - beta_j / r
    gap_bad = np.array([evaluator.value(float(z), BAD) for z in ls]) - beta_j / r
    pooled_under = benefit(l_under) / r
    e_hat, clamp_note = _landing_effort_bound(l_under, l1, params)

    conditions = [
        _make_condition(
            "a", "good type holds full effort under scrutiny",
            float(np.min(gap_good)), costs.good.marginal(1.0) / lam, "ge",
        ),
        _make_condition(
            "b", "bad type stays idle under scrutiny",
            float(np.max(gap_bad)), costs.bad.marginal(0.0) / lam, "le",
        ),
        _make_condition(
            "c", "good type stays idle in the switched region",
            pooled_under - evaluator.value(l1, GOOD), costs.good.marginal(0.0) / lam, "lt",
        ),
        _make_condition(
            "d", "bad type's switched motive stays below full effort",
            pooled_under - benefit(l_over) / r, costs.bad.marginal(1.0) / lam, "lt",
        ),
        _make_condition(
            "e", "bad type's switched motive clears the scrutiny-landing effort",
            pooled_under - evaluator.value(l1, BAD), costs.bad.marginal(e_hat) / lam, "gt",
            note=clamp_note,
        ),
        _make_condition(
            "f", "jumps from the scrutiny cutoff land below the lower threshold",
            l_over + shift, l_under, "lt",
        ),
    ]
    bound = scrutiny_bounds(params, benefit, costs)
    return EquilibriumReport(
        family="primitive-bounded",
        conditions=conditions,
        extrema={"v_scrutiny_inf_good": evaluator.value(l1, GOOD),
                 "v_scrutiny_inf_bad": evaluator.value(l1, BAD)},
        verdict=_verdict(conditions),
        n_star=bound.n_star,
        width_bound=bound.width_bound,
    )


@dataclass
class RateAsymmetryEntry:
    delta: float
    d_good: float
    d_bad: float
    report: EquilibriumReport | None
    stasis: StasisValues | None
    failure: ConstructionFailure | None

    @property
    def passed(self) -> bool:
        return self.report is not None and self.report.passed


@dataclass
class RateAsymmetrySweep:
    entries: list[RateAsymmetryEntry]
    l_under: float
    l0: float
    l1: float
    l_over: float

    @property
    def largest_passing_delta(self) -> float | None:
        passing = [e.delta for e in self.entries if e.passed]
        return max(passing) if passing else None


def check_rate_asymmetry(
    l_under: float,
    l0: float,
    l1: float,
    l_over: float,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    deltas,
    n_steps: int = 2000,
) -> RateAsymmetrySweep:
    """Re-solve and re-check the switched construction with split baseline rates.

    For each delta the rates become d_good = d - delta, d_bad = d + delta;
    the lower threshold turns into a stasis point whose balance equations
    provide the boundary values.  delta = 0 reduces exactly to the
    symmetric solve-and-check.
    """
    if not params.symmetric:
        raise ValueError("pass the symmetric benchmark params; deltas produce the splits")
    entries: list[RateAsymmetryEntry] = []
    for delta in deltas:
        if delta < 0 or delta > params.d:
            raise ValueError("need 0 <= delta <= d so both rates stay nonnegative")
        if delta == 0.0:
            p = params
        else:
            p = ModelParams(
                lam=params.lam, r=params.r, d=params.d,
                d_good=params.d - delta, d_bad=params.d + delta,
            )
        result = switched_value_solve(l_under, l0, l1, l_over, p, benefit, costs, n_steps=n_steps)
        if not result.ok:
            entries.append(RateAsymmetryEntry(delta, p.d_good, p.d_bad, None, None, result.failure))
            continue
        report = check_value_conditions(result.profile, result.table, p, benefit, costs)
        entries.append(RateAsymmetryEntry(delta, p.d_good, p.d_bad, report, result.stasis, None))
    return RateAsymmetrySweep(entries, l_under, l0, l1, l_over)


@dataclass(frozen=True)
class ScrutinyBound:
    """Diagnostics bounding any scrutiny region when the baseline rate is positive."""

    applicable: bool
    n_star: float
    jump_length: float | None
    width_bound: float | None


def scrutiny_bounds(params: ModelParams, benefit: BenefitFn, costs: CostPair) -> ScrutinyBound:
    """Max number of incentive-compatible consecutive jumps and the implied width.

    ``n_star = lam * (beta_max - beta_min) / (r * c'_good(1))``; with d > 0
    each scrutiny jump has fixed length |ln(d / (lam + d))|, so the region
    can be at most ``n_star`` jumps wide.
    """
    n_star = params.lam * (benefit.beta_max - benefit.beta_min) / (
        params.r * costs.good.marginal(1.0)
    )
    d = params.d
    if not params.symmetric or d <= 0.0:
        return ScrutinyBound(applicable=False, n_star=n_star, jump_length=None, width_bound=None)
    jump_length = abs(math.log(d / (params.lam + d)))
    return ScrutinyBound(True, n_star, jump_length, n_star * jump_length)


def best_response_verify(
    profile: StrategyProfile,
    table: ValueTable,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    grid: np.ndarray | None = None,
) -> float:
    """Largest flow gain any one-shot effort deviation achieves on the grid.

    At every grid point the profile's effort is compared against the
    maximizer of the sender's flow objective given the table values; the
    profile is a mutual best response exactly when the largest gain is
    (numerically) zero.
    """
    if grid is None:
        grid = table.grid
    worst = 0.0
    for l in np.asarray(grid, dtype=float):
        l = float(l)
        if not math.isfinite(l):
            continue
        e_good, e_bad = profile.efforts(l)
        j = jump_target(l, e_good, e_bad, params)
        for tag, e_prof in ((GOOD, e_good), (BAD, e_bad)):
            cost = costs.for_type(tag)
            delta = table.value(j, tag) - table.value(l, tag)
            best, _ = _best_flow_gain(delta, params.baseline(tag), params.lam, cost)
            played = (params.lam * (1.0 - e_prof) + params.baseline(tag)) * delta - cost(e_prof)
            worst = max(worst, best - played)
    return worst


@dataclass
class SearchSpec:
    """Threshold search domain: each coordinate is fixed or a (lo, hi) range."""

    l_under: float | tuple[float, float]
    l0: float | tuple[float, float]
    l1: float | tuple[float, float]
    l_over: float | tuple[float, float] = INF
    coarse: int = 21
    max_solves: int = 12

    def axis(self, name: str) -> np.ndarray:
        value = getattr(self, name)
        if isinstance(value, tuple):
            return np.linspace(value[0], value[1], self.coarse)
        return np.array([value])


@dataclass
class SearchResult:
    profile: StrategyProfile | None
    table: ValueTable | None
    report: EquilibriumReport | None
    solve: SwitchedSolveResult | None
    verdict: str
    thresholds: tuple[float, float, float, float] | None
    candidates_tried: int


def find_equilibrium(
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    spec: SearchSpec,
    n_steps: int = 2000,
    grid_spec: GridSpec | None = None,
) -> SearchResult:
    """Search thresholds for a valid switched-effort construction.

    Candidates from the coarse grid are screened with the primitive
    conditions (cheap, no ODE solve), then solved and checked in order of
    decreasing screened margin until one passes all value-based
    conditions.  On total failure the least-violated candidate is
    returned with verdict "fail".
    """
    combos = []
    for lu, l0, l1, lov in product(
        spec.axis("l_under"), spec.axis("l0"), spec.axis("l1"), spec.axis("l_over")
    ):
        lu, l0, l1, lov = float(lu), float(l0), float(l1), float(lov)
        if not (lu < l0 <= l1 < lov):
            continue
        combos.append((lu, l0, l1, lov))
    if not combos:
        raise ValueError("search domain contains no ordered threshold combinations")

    def screen(combo) -> float:
        lu, l0, l1, lov = combo
        try:
            if params.symmetric and params.d == 0.0 and math.isinf(lov):
                rep = check_primitive_conditions(lu, l1, params, benefit, costs)
            elif params.symmetric and params.d > 0.0 and math.isfinite(lov):
                rep = check_primitive_conditions_bounded(lu, l1, lov, params, benefit, costs)
            else:
                return 0.0
        except ValueError:
            return 0.0
        return rep.min_margin

    scored = sorted(combos, key=lambda c: (-screen(c), c[2]))
    best: tuple[float, SwitchedSolveResult, EquilibriumReport, tuple] | None = None
    tried = 0
    for combo in scored[: max(spec.max_solves, 1)]:
        lu, l0, l1, lov = combo
        tried += 1
        result = switched_value_solve(lu, l0, l1, lov, params, benefit, costs,
                                      n_steps=n_steps, grid_spec=grid_spec)
        if not result.ok:
            candidate = (-math.inf, result, None, combo)
        else:
            report = check_value_conditions(result.profile, result.table, params, benefit, costs)
            candidate = (report.min_margin, result, report, combo)
            if report.passed:
                best = candidate
                break
        if best is None or candidate[0] > best[0]:
            best = candidate
    margin, result, report, combo = best
    if report is None:
        report = EquilibriumReport(
            family="value", conditions=[], verdict="fail",
            details={"construction_failure": result.failure.__dict__ if result.failure else None},
        )
    verdict = "pass" if report.passed else "fail"
    return SearchResult(
        profile=result.profile,
        table=result.table,
        report=report,
        solve=result,
        verdict=verdict,
        thresholds=combo,
        candidates_tried=tried,
    )
