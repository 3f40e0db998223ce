"""Noiseless discrete-time variant with belief threats.

Effort is publicly observed each period.  In the candidate equilibrium the
bad type signals ``e0`` in the first period while the good type mixes
between ``e0`` and zero; zero effort in the first period triggers a
scrutiny phase in which only the good type keeps signalling ``e1``
forever, sustained by the threat of a permanently minimal belief after
any deviation.  All continuation payoffs are closed forms, so checking a
candidate reduces to three inequalities plus the good type's indifference
equation.

The per-period benefit is the belief itself, ``beta(l) = exp(l) / (1 + exp(l))``,
so ``beta_min = 0`` and ``beta_max = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import belief_from_log_odds

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class DiscreteParams:
    """Discount factor, linear per-period effort costs, initial log odds."""

    delta: float
    c_good: float
    c_bad: float
    l0: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not self.c_bad > self.c_good > 0.0:
            raise ValueError("need c_bad > c_good > 0")

    @property
    def beta_min(self) -> float:
        return 0.0

    @property
    def beta_max(self) -> float:
        return 1.0


@dataclass(frozen=True)
class DiscreteCandidate:
    """First-period effort, the good type's mixing weight on it, scrutiny effort."""

    e0: float
    q_good: float
    e1: float

    def __post_init__(self) -> None:
        if self.e0 < 0.0 or self.e1 < 0.0:
            raise ValueError("efforts must be >= 0")
        if not 0.0 < self.q_good < 1.0:
            raise ValueError("q_good must lie strictly inside (0, 1): full separation is impossible")


def _first_period_flow(params: DiscreteParams, q: float) -> float:
    """Discounted lifetime belief benefit after the high first-period signal.

    Observing e0 moves the log odds to l0 + ln(q), where they stay forever.
    """
    mu = q * math.exp(params.l0) / (1.0 + q * math.exp(params.l0))
    return mu / (1.0 - params.delta)


@dataclass(frozen=True)
class DiscreteReport:
    """Inequality values and the good type's indifference residual.

    Each inequality is recorded as (left, right) with pass meaning
    left >= right up to tolerance.  The residual is signed: the good
    type's payoff from the first-period signal minus from withholding it.
    """

    scrutiny_good: tuple[float, float]
    scrutiny_bad: tuple[float, float]
    bad_first_period: tuple[float, float]
    indifference_residual: float
    q_interior: bool
    inequalities_pass: bool
    exact: bool


def check_discrete(params: DiscreteParams, cand: DiscreteCandidate) -> DiscreteReport:
    """Evaluate the three sustaining inequalities and the indifference residual."""
    bmax, bmin, delta = params.beta_max, params.beta_min, params.delta
    scrutiny_good = (bmax - params.c_good * cand.e1, bmin)
    scrutiny_bad = (bmin, bmax - params.c_bad * cand.e1)
    flow = _first_period_flow(params, cand.q_good)
    bad_first = (flow - params.c_bad * cand.e0, bmax + delta / (1.0 - delta) * bmin)
    lhs = flow - params.c_good * cand.e0
    rhs = bmax + delta / (1.0 - delta) * (bmax - params.c_good * cand.e1)
    residual = lhs - rhs
    tol = 1e-12
    inequalities = (
        scrutiny_good[0] >= scrutiny_good[1] - tol
        and scrutiny_bad[0] >= scrutiny_bad[1] - tol
        and bad_first[0] >= bad_first[1] - tol
    )
    q_interior = 0.0 < cand.q_good < 1.0
    return DiscreteReport(
        scrutiny_good=scrutiny_good,
        scrutiny_bad=scrutiny_bad,
        bad_first_period=bad_first,
        indifference_residual=residual,
        q_interior=q_interior,
        inequalities_pass=inequalities and q_interior,
        exact=abs(residual) < RESIDUAL_TOL,
    )


def solve_q(params: DiscreteParams, e0: float, e1: float) -> float | None:
    """Mixing weight making the good type indifferent in the first period.

    Solves ``flow(q) - c_good * e0 = bmax + delta/(1-delta) * (bmax - c_good * e1)``
    by monotone bisection on q in (0, 1); returns None when no interior
    root exists (the left side is bounded above by 1/(1-delta)).
    """
    target = (
        params.beta_max
        + params.delta / (1.0 - params.delta) * (params.beta_max - params.c_good * e1)
        + params.c_good * e0
    )

    def lhs(q: float) -> float:
        return _first_period_flow(params, q)

    lo, hi = 0.0, 1.0
    f_lo, f_hi = lhs(1e-15) - target, lhs(1.0) - target
    if f_lo >= 0.0 or f_hi <= 0.0:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if lhs(mid) - target < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    q = 0.5 * (lo + hi)
    if not 0.0 < q < 1.0:
        return None
    return q


def search_discrete(
    params: DiscreteParams,
    e0_grid,
    e1_grid,
) -> list[tuple[DiscreteCandidate, DiscreteReport]]:
    """Exact equilibrium candidates over an (e0, e1) grid.

    For each pair the mixing weight comes from :func:`solve_q`; candidates
    pass when all inequalities hold, the indifference residual vanishes to
    tolerance, and both efforts are strictly positive.
    """
    found: list[tuple[DiscreteCandidate, DiscreteReport]] = []
    for e0 in np.asarray(e0_grid, dtype=float):
        for e1 in np.asarray(e1_grid, dtype=float):
            if e0 <= 0.0 or e1 <= 0.0:
                continue
            q = solve_q(params, float(e0), float(e1))
            if q is None:
                continue
            cand = DiscreteCandidate(e0=float(e0), q_good=q, e1=float(e1))
            report = check_discrete(params, cand)
            if report.inequalities_pass and report.exact:
                found.append((cand, report))
    return found
