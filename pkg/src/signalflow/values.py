"""Continuation values for a given expected strategy profile.

Three evaluation routes, matched to the region structure:

* pooling regions: the belief is frozen, so the value is ``beta(l) / r``
  in closed form;
* scrutiny regions (good type at full effort, bad type at zero): each
  type's value solves a linear first-order ODE whose jump term lands in a
  pooling region; the integrating-factor integral is evaluated by
  composite Simpson quadrature (:class:`ScrutinyValues`);
* switched regions (bad type signalling, good type idle): the coupled
  value ODEs are marched upward from the lower threshold by RK4, solving
  the bad type's best-response condition at every stage
  (:func:`switched_value_solve`).

The solver returns a :class:`ValueTable` that dispatches point queries to
the right route, plus the bad-type effort table that makes the profile a
mutual best response.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    BAD,
    GOOD,
    INF,
    TYPES,
    BenefitFn,
    CostPair,
    ModelParams,
    drift,
    jump_target,
)
from .strategy import (
    Region,
    RegionKind,
    StrategyProfile,
    effort_at,
    switched_profile,
)

_TAIL_EPS_EXPONENT = 45.0  # exp(-45) ~ 3e-20: saturation margin for unbounded regions


def _benefit_array(benefit: BenefitFn, z: np.ndarray) -> np.ndarray:
    """Vectorized, overflow-safe benefit evaluation."""
    x = np.asarray(z, dtype=float) - benefit.k
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ez = np.exp(x[~pos])
    out[~pos] = ez / (1.0 + ez)
    return benefit.m + benefit.s * out


def pooling_value(l: float, params: ModelParams, benefit: BenefitFn) -> float:
    """Value of either type where both are expected to stay idle forever."""
    return benefit(l) / params.r


def scrutiny_limit(params: ModelParams, benefit: BenefitFn, costs: CostPair, type_tag: str) -> float:
    """Limit of the scrutiny-region value as l grows without bound.

    The integrand of the closed form converges, so the value tends to its
    stationary level: flow at the top divided by the effective discount
    (time discount plus own jump intensity).  With a zero good-type
    baseline rate the jump lands at -inf, otherwise at the top of the
    benefit range.
    """
    lam, r = params.lam, params.r
    beta_at_jump = benefit.beta_min if params.d_good == 0.0 else benefit.beta_max
    if type_tag == GOOD:
        return (benefit.beta_max - costs.good(1.0) + params.d_good * beta_at_jump / r) / (r + params.d_good)
    return (benefit.beta_max + (lam + params.d_bad) * beta_at_jump / r) / (r + lam + params.d_bad)


class ScrutinyValues:
    """Closed-form value evaluator on a scrutiny region [l1, l_over).

    The value of type theta solves ``flow * V' = kappa * V - a(z)`` with
    ``flow = lam - d_good + d_bad`` (the upward belief drift),
    ``kappa_G = r + d_good``, ``kappa_B = r + lam + d_bad`` and an
    inhomogeneity ``a`` that folds in the flow benefit, the good type's
    full-effort cost and the pooled value at the jump target
    ``z + ln(d_good / (lam + d_bad))``.  The boundary condition is
    value matching ``V(l_over) = beta(l_over) / r`` for a finite upper
    threshold and the stationary limit otherwise.

    The integral is accumulated backward over an internal uniform grid with
    per-cell Simpson rules; point queries add an exact partial-cell
    correction, so they cost O(1) and agree with the accumulated solution
    to quadrature precision.
    """

    def __init__(
        self,
        l1: float,
        l_over: float,
        params: ModelParams,
        benefit: BenefitFn,
        costs: CostPair,
        step: float | None = None,
    ):
        if not l1 < l_over:
            raise ValueError("need l1 < l_over")
        lam, r = params.lam, params.r
        self.params = params
        self.benefit = benefit
        self.l1 = l1
        self.l_over = l_over
        self.flow = lam - params.d_good + params.d_bad
        if self.flow <= 0:
            raise ValueError("scrutiny drift must be positive (lam > d_good - d_bad)")
        self._cg1 = costs.good(1.0)
        if params.d_good == 0.0:
            self.jump_shift = -INF
        else:
            self.jump_shift = math.log(params.d_good / (lam + params.d_bad))
        self.kappa = {GOOD: r + params.d_good, BAD: r + lam + params.d_bad}
        self.limits = {tag: scrutiny_limit(params, benefit, costs, tag) for tag in TYPES}

        if math.isfinite(l_over):
            hi = l_over
            v_hi = {tag: benefit(l_over) / r for tag in TYPES}
        else:
            hi = max(l1, benefit.k + _TAIL_EPS_EXPONENT)
            if self.jump_shift != -INF:
                hi = max(hi, benefit.k - self.jump_shift + _TAIL_EPS_EXPONENT)
            hi = max(hi, l1 + 30.0)
            v_hi = dict(self.limits)
        self.hi = hi

        if step is None:
            step = min(5e-3, lam / (1000.0 * r))
        n = max(2, math.ceil((hi - l1) / step))
        if n > 400_000:
            n = 400_000
        self._nodes = np.linspace(l1, hi, n + 1)
        self._h = (hi - l1) / n
        mids = 0.5 * (self._nodes[:-1] + self._nodes[1:])

        f_nodes = {tag: self._a_array(self._nodes, tag) / self.flow for tag in TYPES}
        f_mids = {tag: self._a_array(mids, tag) / self.flow for tag in TYPES}

        self._v = {}
        h = self._h
        for tag in TYPES:
            x = self.kappa[tag] * h / self.flow
            e_full = math.exp(-x)
            e_half = math.exp(-0.5 * x)
            cell = (h / 6.0) * (
                f_nodes[tag][:-1] + 4.0 * f_mids[tag] * e_half + f_nodes[tag][1:] * e_full
            )
            values = np.empty(n + 1)
            values[n] = v_hi[tag]
            acc = v_hi[tag]
            cell_list = cell.tolist()
            for i in range(n - 1, -1, -1):
                acc = e_full * acc + cell_list[i]
                values[i] = acc
            self._v[tag] = values

    def _a_array(self, z: np.ndarray, tag: str) -> np.ndarray:
        beta_z = _benefit_array(self.benefit, z)
        if self.jump_shift == -INF:
            beta_j = np.full_like(beta_z, self.benefit.beta_min)
        else:
            beta_j = _benefit_array(self.benefit, z + self.jump_shift)
        r = self.params.r
        if tag == GOOD:
            return beta_z - self._cg1 + self.params.d_good * beta_j / r
        return beta_z + (self.params.lam + self.params.d_bad) * beta_j / r

    def _a_scalar(self, z: float, tag: str) -> float:
        if self.jump_shift == -INF:
            beta_j = self.benefit.beta_min
        else:
            beta_j = self.benefit(z + self.jump_shift)
        r = self.params.r
        if tag == GOOD:
            return self.benefit(z) - self._cg1 + self.params.d_good * beta_j / r
        return self.benefit(z) + (self.params.lam + self.params.d_bad) * beta_j / r

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes

    def limit(self, type_tag: str) -> float:
        return self.limits[type_tag]

    def value(self, l: float, type_tag: str) -> float:
        """Continuation value at ``l`` in [l1, l_over] (or any l >= l1 when unbounded)."""
        if type_tag not in TYPES:
            raise ValueError(f"unknown type tag {type_tag!r}")
        if l == INF:
            if math.isinf(self.l_over):
                return self.limits[type_tag]
            raise ValueError("l = +inf lies outside a bounded scrutiny region")
        if l < self.l1 - 1e-12:
            raise ValueError(f"l={l} below the scrutiny region start {self.l1}")
        if math.isfinite(self.l_over) and l > self.l_over + 1e-12:
            raise ValueError(f"l={l} above the scrutiny region end {self.l_over}")
        if l >= self.hi:
            return self.limits[type_tag] if math.isinf(self.l_over) else self._v[type_tag][-1]
        l = max(l, self.l1)
        nodes = self._nodes
        i = int(np.searchsorted(nodes, l, side="right")) - 1
        i = min(max(i, 0), len(nodes) - 2)
        if l == nodes[i]:
            return float(self._v[type_tag][i])
        zr = float(nodes[i + 1])
        h = zr - l
        mid = l + 0.5 * h
        x = self.kappa[type_tag] * h / self.flow
        e_full = math.exp(-x)
        e_half = math.exp(-0.5 * x)
        f_l = self._a_scalar(l, type_tag) / self.flow
        f_m = self._a_scalar(mid, type_tag) / self.flow
        f_r = self._a_scalar(zr, type_tag) / self.flow
        cell = (h / 6.0) * (f_l + 4.0 * f_m * e_half + f_r * e_full)
        return e_full * float(self._v[type_tag][i + 1]) + cell

    def values(self, ls: np.ndarray, type_tag: str) -> np.ndarray:
        return np.array([self.value(float(l), type_tag) for l in np.asarray(ls, dtype=float)])


def scrutiny_value(
    l: float,
    profile: StrategyProfile,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    type_tag: str,
) -> float:
    """One-off closed-form evaluation on the profile's scrutiny region.

    For repeated queries construct :class:`ScrutinyValues` once instead.
    """
    region = profile.scrutiny_region()
    if region is None:
        raise ValueError("profile has no scrutiny region")
    if not (region.lower <= l <= region.upper):
        raise ValueError(f"l={l} outside the scrutiny region [{region.lower}, {region.upper})")
    evaluator = ScrutinyValues(region.lower, region.upper, params, benefit, costs)
    return evaluator.value(l, type_tag)


@dataclass(frozen=True)
class StasisValues:
    """Values and local geometry at an absorbing lower threshold.

    With type-dependent baseline rates (d_good < d_bad) the flow oscillates
    around the threshold, spending fraction ``w`` just below it.  Signals
    then land at ``j_minus`` (pooled rates) or ``j_plus`` (the switched
    region's jump) and the threshold values solve one linear equation per
    type.
    """

    l_under: float
    v_good: float
    v_bad: float
    w: float
    lam_star_bad: float
    j_minus: float
    j_plus: float
    e_bad_plus: float


@dataclass(frozen=True)
class ConstructionFailure:
    """A switched-effort construction broke down; names the violated condition."""

    condition: str
    at_l: float
    message: str


class _FocFailure(Exception):
    def __init__(self, condition: str, at_l: float, message: str):
        super().__init__(message)
        self.failure = ConstructionFailure(condition, at_l, message)


@dataclass
class GridSpec:
    """Sampling density for assembled value tables."""

    gap_points: int = 201
    scrutiny_step: float = 1e-3
    scrutiny_span_cap: float = 40.0
    pool_pad: float = 2.0
    pool_points: int = 101


@dataclass
class ValueTable:
    """Gridded values with closed-form evaluators layered on top.

    ``grid``/``v_good``/``v_bad`` are a finite sample across the profile's
    regions (for export and residual diagnostics).  Point queries through
    :meth:`value` use the analytic route wherever one exists: pooling and
    scrutiny regions are evaluated in closed form, only the switched
    region interpolates the solved arrays linearly.
    """

    grid: np.ndarray
    v_good: np.ndarray
    v_bad: np.ndarray
    closed_form_domains: tuple[tuple[float, float, str], ...]
    boundary: dict[str, float]
    profile: StrategyProfile
    params: ModelParams
    benefit: BenefitFn
    costs: CostPair
    scrutiny: ScrutinyValues | None = None
    switched_l: np.ndarray | None = None
    switched_v_good: np.ndarray | None = None
    switched_v_bad: np.ndarray | None = None

    def value(self, l: float, type_tag: str) -> float:
        if type_tag not in TYPES:
            raise ValueError(f"unknown type tag {type_tag!r}")
        if l == INF:
            return self.benefit.beta_max / self.params.r
        if l == -INF:
            return self.benefit.beta_min / self.params.r
        region = self.profile.region_at(l)
        if region.kind is RegionKind.POOL_ZERO:
            return self.benefit(l) / self.params.r
        if region.kind is RegionKind.SCRUTINY:
            if self.scrutiny is None:
                raise ValueError("table has no scrutiny evaluator")
            return self.scrutiny.value(l, type_tag)
        if region.kind is RegionKind.SWITCHED:
            if self.switched_l is None:
                raise ValueError("table has no switched-region solution")
            ys = self.switched_v_good if type_tag == GOOD else self.switched_v_bad
            return float(np.interp(l, self.switched_l, ys))
        raise ValueError("custom regions have no value evaluator")

    def values(self, ls: np.ndarray, type_tag: str) -> np.ndarray:
        return np.array([self.value(float(l), type_tag) for l in np.asarray(ls, dtype=float)])


def _assemble_table(
    profile: StrategyProfile,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    scrutiny: ScrutinyValues | None,
    switched: tuple[np.ndarray, np.ndarray, np.ndarray] | None,
    spec: GridSpec,
    boundary: dict[str, float],
) -> ValueTable:
    pieces: list[np.ndarray] = []
    finite_bounds = [b for r in profile.regions for b in (r.lower, r.upper) if math.isfinite(b)]
    lo_view = (min(finite_bounds) if finite_bounds else -6.0) - spec.pool_pad
    hi_view = (max(finite_bounds) if finite_bounds else 6.0) + spec.pool_pad
    for region in profile.regions:
        lo = max(region.lower, lo_view)
        hi = min(region.upper, hi_view)
        if region.kind is RegionKind.SWITCHED and switched is not None:
            pieces.append(switched[0])
            continue
        if region.kind is RegionKind.SCRUTINY:
            hi = min(region.upper, region.lower + spec.scrutiny_span_cap)
            n = max(2, int(math.ceil((hi - lo) / spec.scrutiny_step)))
            pieces.append(np.linspace(lo, hi, n + 1))
            continue
        if hi <= lo:
            continue
        n = spec.gap_points if region.lower != -INF and region.upper != INF else spec.pool_points
        pieces.append(np.linspace(lo, hi, n))
    grid = np.unique(np.concatenate(pieces))

    table = ValueTable(
        grid=grid,
        v_good=np.empty_like(grid),
        v_bad=np.empty_like(grid),
        closed_form_domains=tuple(
            (r.lower, r.upper, r.kind.value)
            for r in profile.regions
            if r.kind in (RegionKind.POOL_ZERO, RegionKind.SCRUTINY)
        ),
        boundary=boundary,
        profile=profile,
        params=params,
        benefit=benefit,
        costs=costs,
        scrutiny=scrutiny,
        switched_l=None if switched is None else switched[0],
        switched_v_good=None if switched is None else switched[1],
        switched_v_bad=None if switched is None else switched[2],
    )
    table.v_good = table.values(grid, GOOD)
    table.v_bad = table.values(grid, BAD)
    return table


def build_value_table(
    profile: StrategyProfile,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    spec: GridSpec | None = None,
) -> ValueTable:
    """Value table for a profile without a switched region (pooling or extremal)."""
    if profile.switched_region() is not None:
        raise ValueError("profiles with a switched region must go through switched_value_solve")
    spec = spec or GridSpec()
    scrutiny = None
    boundary: dict[str, float] = {}
    region = profile.scrutiny_region()
    if region is not None:
        scrutiny = ScrutinyValues(region.lower, region.upper, params, benefit, costs)
        boundary["scrutiny_limit_good"] = scrutiny.limit(GOOD)
        boundary["scrutiny_limit_bad"] = scrutiny.limit(BAD)
    return _assemble_table(profile, params, benefit, costs, scrutiny, None, spec, boundary)


@dataclass
class SwitchedSolveResult:
    """Outcome of the switched-region construction.

    ``failure`` is set (and the solution fields are None) when no
    best-response effort with a jump landing in the scrutiny region exists
    somewhere in the region; the failing sufficient condition is named.
    """

    profile: StrategyProfile | None
    table: ValueTable | None
    effort_l: np.ndarray | None
    effort_e: np.ndarray | None
    stasis: StasisValues | None
    failure: ConstructionFailure | None
    boundary: dict | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


class _SwitchedSolver:
    def __init__(self, l_under, l0, l1, l_over, params, benefit, costs, foc_tol=1e-10):
        self.l_under, self.l0, self.l1, self.l_over = l_under, l0, l1, l_over
        self.params, self.benefit, self.costs = params, benefit, costs
        self.foc_tol = foc_tol
        self.scrut = ScrutinyValues(l1, l_over, params, benefit, costs)
        p = params
        self._top_bad = (
            self.scrut.limit(BAD) if math.isinf(l_over) else benefit(l_over) / p.r
        )
        self._v_l1_bad = self.scrut.value(l1, BAD)

    def jump_from_effort(self, l: float, e: float) -> float:
        p = self.params
        den = p.lam * (1.0 - e) + p.d_bad
        if den == 0.0:
            return INF
        return l + math.log((p.lam + p.d_good) / den)

    def effort_from_jump(self, l: float, j: float) -> float:
        # exact inverse of jump_from_effort: lam*(1-e) + d_bad = (lam+d_good)*exp(l-j)
        p = self.params
        return 1.0 + p.d_bad / p.lam - ((p.lam + p.d_good) / p.lam) * math.exp(l - j)

    def _scrut_bad(self, j: float) -> float:
        if j == INF:
            return self.scrut.limit(BAD)
        return self.scrut.value(j, BAD)

    def foc_effort(self, l: float, v_bad: float) -> tuple[float, float]:
        """Bad-type effort making the profile self-consistent at ``l``.

        The best-response condition equates the marginal cost with the
        jump-avoidance motive ``lam * (V_B(l) - V_B(j))``, where the jump
        target j itself moves with the candidate effort.  The left side
        strictly decreases and the right side weakly increases in effort,
        so the crossing is unique.  Linear costs pin the jump target
        directly (indifference fixes V_B(j)), which is inverted through
        the monotone scrutiny closed form.
        """
        cost = self.costs.bad
        lam = self.params.lam
        scale = 1.0 + abs(v_bad)
        if cost.linear:
            target = v_bad - cost.a / lam
            if target < self._v_l1_bad - 1e-11 * scale:
                raise _FocFailure(
                    "e", l,
                    "jump-avoidance motive below marginal cost at the shortest "
                    "scrutiny-landing jump",
                )
            if target >= self._top_bad - 1e-13 * scale:
                raise _FocFailure(
                    "d", l,
                    "jump-avoidance motive exceeds marginal cost even at the "
                    "longest jump inside the scrutiny region",
                )
            j = self._invert_bad_value(min(max(target, self._v_l1_bad), self._top_bad))
            e = self.effort_from_jump(l, j)
            return min(max(e, 0.0), 1.0), j
        # strictly convex costs: bisection on effort
        e_lo = self.effort_from_jump(l, self.l1)
        e_lo = min(max(e_lo, 0.0), 1.0)
        if math.isfinite(self.l_over):
            e_hi = min(1.0, self.effort_from_jump(l, self.l_over))
        else:
            e_hi = 1.0
        gap_lo = lam * (v_bad - self._scrut_bad(self.jump_from_effort(l, e_lo))) - cost.marginal(e_lo)
        if gap_lo < -1e-11 * scale:
            raise _FocFailure(
                "e", l,
                "jump-avoidance motive below marginal cost at the shortest "
                "scrutiny-landing jump",
            )
        gap_hi = lam * (v_bad - self._scrut_bad(self.jump_from_effort(l, e_hi))) - cost.marginal(e_hi)
        if gap_hi > 1e-11 * scale:
            raise _FocFailure(
                "d", l,
                "jump-avoidance motive exceeds marginal cost at the maximal "
                "admissible effort",
            )
        lo, hi = e_lo, e_hi
        while hi - lo > self.foc_tol:
            midpoint = 0.5 * (lo + hi)
            gap = lam * (v_bad - self._scrut_bad(self.jump_from_effort(l, midpoint))) - cost.marginal(midpoint)
            if gap >= 0.0:
                lo = midpoint
            else:
                hi = midpoint
        e = 0.5 * (lo + hi)
        return e, self.jump_from_effort(l, e)

    def _invert_bad_value(self, target: float) -> float:
        """Monotone inversion of the scrutiny closed form for the bad type.

        The precomputed node values bracket the root within one cell, so
        only a short within-cell bisection remains.
        """
        nodes = self.scrut.nodes
        node_values = self.scrut._v[BAD]
        if node_values[-1] <= target:
            return float(nodes[-1])
        i = int(np.searchsorted(node_values, target, side="left"))
        if i == 0:
            return float(nodes[0])
        lo, hi = float(nodes[i - 1]), float(nodes[i])
        v_lo, v_hi = float(node_values[i - 1]), float(node_values[i])
        # Newton from the linear-interpolated start; the value derivative is
        # analytic, (kappa * V - a) / flow.  Bisection bounds safeguard it.
        z = lo + (hi - lo) * (target - v_lo) / (v_hi - v_lo)
        kappa = self.scrut.kappa[BAD]
        for _ in range(60):
            v = self.scrut.value(z, BAD)
            err = v - target
            if abs(err) < 1e-14 * max(1.0, abs(target)):
                break
            if err < 0.0:
                lo = z
            else:
                hi = z
            slope = (kappa * v - self.scrut._a_scalar(z, BAD)) / self.scrut.flow
            step = err / slope if slope > 0.0 else 0.0
            z -= step
            if not lo < z < hi:
                z = 0.5 * (lo + hi)
        return z

    def rhs(self, l: float, v_good: float, v_bad: float) -> tuple[float, float]:
        p = self.params
        e, j = self.foc_effort(l, v_bad)
        mu = -p.lam * e + p.d_bad - p.d_good
        if mu >= 0.0:
            raise _FocFailure(
                "e", l, "switched-region effort too small for a downward belief drift"
            )
        beta_l = self.benefit(l)
        vjg = self.scrut.value(j, GOOD) if j != INF else self.scrut.limit(GOOD)
        vjb = self._scrut_bad(j)
        d_bad_rate = p.lam * (1.0 - e) + p.d_bad
        dvb = (p.r * v_bad - beta_l + self.costs.bad(min(e, 1.0)) - d_bad_rate * (vjb - v_bad)) / mu
        dvg = (p.r * v_good - beta_l - (p.lam + p.d_good) * (vjg - v_good)) / mu
        return dvg, dvb

    def boundary_values(self) -> tuple[float, float, StasisValues | None]:
        p = self.params
        beta_u = self.benefit(self.l_under)
        if p.d_good == p.d_bad:
            v0 = beta_u / p.r
            return v0, v0, None
        if p.d_good > p.d_bad:
            raise ValueError("type-dependent rates require d_good < d_bad")
        lam, r = p.lam, p.r
        j_minus = self.l_under + math.log((lam + p.d_good) / (lam + p.d_bad))
        v_jm = self.benefit(j_minus) / r
        v_bad = beta_u / r
        e, _ = self.foc_effort(self.l_under, v_bad)
        w = lam_star = j_plus = None
        for _ in range(200):
            w = (p.d_good - p.d_bad + lam * e) / (lam * e)
            if not 0.0 < w <= 1.0:
                raise _FocFailure("e", self.l_under, "stasis occupancy weight outside (0, 1]")
            lam_star = lam * (1.0 - e) + p.d_bad
            j_plus = self.jump_from_effort(self.l_under, e)
            v_jp = self._scrut_bad(j_plus)
            denom = r + (lam + p.d_bad) * w + lam_star * (1.0 - w)
            v_new = (beta_u + (lam + p.d_bad) * w * v_jm + lam_star * (1.0 - w) * v_jp) / denom
            e_new, _ = self.foc_effort(self.l_under, v_new)
            if abs(v_new - v_bad) < 1e-13 * (1.0 + abs(v_new)) and abs(e_new - e) < 1e-13:
                v_bad, e = v_new, e_new
                break
            v_bad, e = v_new, e_new
        v_jp_good = self.scrut.value(j_plus, GOOD) if j_plus != INF else self.scrut.limit(GOOD)
        v_good = (beta_u + (lam + p.d_good) * (w * v_jm + (1.0 - w) * v_jp_good)) / (r + lam + p.d_good)
        stasis = StasisValues(
            l_under=self.l_under,
            v_good=v_good,
            v_bad=v_bad,
            w=w,
            lam_star_bad=lam_star,
            j_minus=j_minus,
            j_plus=j_plus,
            e_bad_plus=e,
        )
        return v_good, v_bad, stasis


def switched_value_solve(
    l_under: float,
    l0: float,
    l1: float,
    l_over: float,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    n_steps: int = 2000,
    grid_spec: GridSpec | None = None,
) -> SwitchedSolveResult:
    """Jointly compute V_G, V_B and the bad type's effort on (l_under, l0].

    Marches the coupled value ODEs upward from the lower threshold with
    RK4, solving the bad type's best-response condition at every stage so
    that jumps land in the scrutiny region.  The boundary value at the
    threshold is the pooled value in the symmetric benchmark and the
    stasis values with type-dependent baseline rates.

    On failure (no admissible best response somewhere), the result carries
    a :class:`ConstructionFailure` naming the violated condition instead
    of raising.
    """
    if not (l_under <= l0 <= l1 < l_over):
        raise ValueError("need l_under <= l0 <= l1 < l_over")
    solver = _SwitchedSolver(l_under, l0, l1, l_over, params, benefit, costs)
    spec = grid_spec or GridSpec()
    if l0 == l_under:
        # degenerate zero-length region: boundary values only, empty table
        try:
            v_good, v_bad, stasis = solver.boundary_values()
        except _FocFailure as exc:
            return SwitchedSolveResult(None, None, None, None, None, exc.failure)
        return SwitchedSolveResult(
            None, None, np.array([]), np.array([]), stasis, None,
            boundary={"l_under": l_under, "v_good_l_under": v_good, "v_bad_l_under": v_bad},
        )
    try:
        v_good, v_bad, stasis = solver.boundary_values()
        start = l_under + 1e-9 * max(1.0, abs(l_under))
        grid = np.linspace(start, l0, n_steps + 1)
        efforts = np.empty(n_steps + 1)
        vgs = np.empty(n_steps + 1)
        vbs = np.empty(n_steps + 1)
        vg, vb = v_good, v_bad
        for k in range(n_steps + 1):
            l = float(grid[k])
            e_k, _ = solver.foc_effort(l, vb)
            efforts[k], vgs[k], vbs[k] = e_k, vg, vb
            if k == n_steps:
                break
            h = float(grid[k + 1] - grid[k])
            k1g, k1b = solver.rhs(l, vg, vb)
            k2g, k2b = solver.rhs(l + 0.5 * h, vg + 0.5 * h * k1g, vb + 0.5 * h * k1b)
            k3g, k3b = solver.rhs(l + 0.5 * h, vg + 0.5 * h * k2g, vb + 0.5 * h * k2b)
            k4g, k4b = solver.rhs(l + h, vg + h * k3g, vb + h * k3b)
            vg += (h / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
            vb += (h / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
    except _FocFailure as exc:
        return SwitchedSolveResult(None, None, None, None, None, exc.failure)

    table_l = grid.copy()
    table_l[0] = l_under  # right-limit values labelled at the threshold itself
    profile = switched_profile(l_under, l0, l1, l_over, table_l, efforts)
    boundary = {
        "l_under": l_under,
        "v_good_l_under": float(vgs[0]),
        "v_bad_l_under": float(vbs[0]),
        "scrutiny_limit_good": solver.scrut.limit(GOOD),
        "scrutiny_limit_bad": solver.scrut.limit(BAD),
    }
    if math.isfinite(l_over):
        boundary["l_over"] = l_over
        boundary["v_l_over"] = benefit(l_over) / params.r
    table = _assemble_table(
        profile,
        params,
        benefit,
        costs,
        solver.scrut,
        (table_l, vgs, vbs),
        spec,
        boundary,
    )
    return SwitchedSolveResult(profile, table, table_l, efforts, stasis, None, boundary=boundary)


def stasis_values(
    profile: StrategyProfile,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
) -> StasisValues:
    """Threshold values from the stasis-point balance equations.

    Uses the profile's stored right-limit effort at the lower threshold;
    values at the jump targets come from the pooling and scrutiny
    closed-form evaluators.  In the symmetric benchmark the equations
    degenerate (w = 1 and a zero-length lower jump) and return
    ``beta(l_under) / r`` for both types.
    """
    sw = profile.switched_region()
    scr = profile.scrutiny_region()
    if sw is None or scr is None or profile.l_under is None:
        raise ValueError("stasis values need a canonical switched profile")
    p = params
    lam, r = p.lam, p.r
    l_under = profile.l_under
    _, e_plus = sw.efforts(l_under)
    if e_plus <= 0.0:
        raise ValueError("switched region must carry strictly positive bad-type effort")
    w = (p.d_good - p.d_bad + lam * e_plus) / (lam * e_plus)
    lam_star = lam * (1.0 - e_plus) + p.d_bad
    j_minus = l_under + math.log((lam + p.d_good) / (lam + p.d_bad))
    j_plus = l_under + math.log((lam + p.d_good) / lam_star)
    evaluator = ScrutinyValues(scr.lower, scr.upper, params, benefit, costs)

    def value_at(l: float, tag: str) -> float:
        region = profile.region_at(l)
        if region.kind is RegionKind.SCRUTINY:
            return evaluator.value(l, tag)
        return benefit(l) / r

    beta_u = benefit(l_under)
    v_jm_g, v_jm_b = value_at(j_minus, GOOD), value_at(j_minus, BAD)
    v_jp_g, v_jp_b = value_at(j_plus, GOOD), value_at(j_plus, BAD)
    v_good = (beta_u + (lam + p.d_good) * (w * v_jm_g + (1.0 - w) * v_jp_g)) / (r + lam + p.d_good)
    denom = r + (lam + p.d_bad) * w + lam_star * (1.0 - w)
    v_bad = (beta_u + (lam + p.d_bad) * w * v_jm_b + lam_star * (1.0 - w) * v_jp_b) / denom
    return StasisValues(l_under, v_good, v_bad, w, lam_star, j_minus, j_plus, e_plus)


def value_bounds_switched(
    l: float,
    l_under: float,
    e_bad,
    params: ModelParams,
    benefit: BenefitFn,
) -> tuple[float, float]:
    """Reach-probability sandwich for the switched-region value.

    Without a signal the belief drifts down to the lower threshold; the
    bound discounts the pooled threshold value by the no-signal
    probability and the travel time, and brackets the complementary event
    by the benefit range.  ``e_bad`` may be a positive constant lower
    bound on the effort or a sampled table ``(l_points, efforts)``.
    """
    r, lam = params.r, params.lam
    if l < l_under:
        raise ValueError("l must lie above the lower threshold")
    if l == l_under:
        v = benefit(l_under) / r
        return v, v
    if np.isscalar(e_bad):
        eps = float(e_bad)
        if eps <= 0.0:
            raise ValueError("effort lower bound must be positive")
        travel = (l - l_under) / eps
    else:
        tl, te = (np.asarray(a, dtype=float) for a in e_bad)
        if np.any(te <= 0.0):
            raise ValueError("effort table must be strictly positive")
        xs = np.linspace(l_under, l, 513)
        ys = 1.0 / np.interp(xs, tl, te)
        travel = float(np.sum(0.5 * (ys[1:] + ys[:-1]) * np.diff(xs)))
    no_signal = math.exp(-travel)
    discounted = math.exp(-(1.0 + r / lam) * travel)
    base = discounted * benefit(l_under) / r
    upper = base + (1.0 - no_signal) * benefit.beta_max / r
    lower = base + (1.0 - no_signal) * benefit.beta_min / r
    return lower, upper


def _best_flow_gain(delta: float, d_theta: float, lam: float, cost) -> tuple[float, float]:
    """Maximize (lam * (1 - e) + d_theta) * delta - cost(e) over e in [0, 1].

    Returns (max value, argmax effort). The objective is concave; the
    stationary point solves -lam * delta = cost'(e).
    """
    if cost.b > 0.0:
        e_star = (-lam * delta - cost.a) / (2.0 * cost.b)
        e_star = min(max(e_star, 0.0), 1.0)
    else:
        e_star = 1.0 if -lam * delta - cost.a > 0.0 else 0.0
    value = (lam * (1.0 - e_star) + d_theta) * delta - cost(e_star)
    return value, e_star


def hjb_residual(
    table: ValueTable,
    profile: StrategyProfile,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    type_tag: str,
) -> float:
    """Max absolute dynamic-programming residual over the table grid.

    Checks ``r V = beta + drift * V' + max_e {(lam (1-e) + d_theta)(V(j) - V) - c(e)}``
    with V' by centered finite differences, skipping points within one
    local grid step of a region boundary (where V' is one-sided).
    """
    grid = table.grid
    v = table.v_good if type_tag == GOOD else table.v_bad
    cost = costs.for_type(type_tag)
    d_theta = params.baseline(type_tag)
    boundaries = sorted(
        {b for r in profile.regions for b in (r.lower, r.upper) if math.isfinite(b)}
    )
    worst = 0.0
    for i in range(1, len(grid) - 1):
        l = float(grid[i])
        step = max(grid[i + 1] - grid[i], grid[i] - grid[i - 1])
        if any(abs(l - b) <= step * (1.0 + 1e-9) for b in boundaries):
            continue
        e_good, e_bad = effort_at(profile, l)
        mu = drift(e_good, e_bad, params)
        j = jump_target(l, e_good, e_bad, params)
        delta = table.value(j, type_tag) - float(v[i])
        gain, _ = _best_flow_gain(delta, d_theta, params.lam, cost)
        vprime = float(v[i + 1] - v[i - 1]) / float(grid[i + 1] - grid[i - 1])
        resid = params.r * float(v[i]) - benefit(l) - mu * vprime - gain
        worst = max(worst, abs(resid))
    return worst
