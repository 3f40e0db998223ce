"""Primitives of the reputation signalling game.

A sender of hidden type (good ``"G"`` or bad ``"B"``) continuously chooses
effort in [0, 1].  Effort suppresses a public Poisson signal whose rate is
``lam * (1 - e) + d_theta``.  The market tracks the log likelihood ratio
``l`` of the good type; ``l`` drifts deterministically between signals and
jumps when one arrives.  The sender earns a flow benefit ``beta(l)`` and
pays a flow effort cost.

Everything in this module is an immutable value object or a pure function,
so instances can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

GOOD = "G"
BAD = "B"
TYPES = (GOOD, BAD)

INF = math.inf


def _check_effort(e: float, name: str = "effort") -> None:
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {e!r}")


def belief_from_log_odds(l: float) -> float:
    """Map a log likelihood ratio to a belief, mu = exp(l) / (1 + exp(l)).

    The endpoints are exact: mu(+inf) = 1 and mu(-inf) = 0.
    """
    if l == INF:
        return 1.0
    if l == -INF:
        return 0.0
    if l >= 0.0:
        return 1.0 / (1.0 + math.exp(-l))
    z = math.exp(l)
    return z / (1.0 + z)


def log_odds_from_belief(mu: float) -> float:
    """Inverse of :func:`belief_from_log_odds`; mu in [0, 1], endpoints map to +/-inf."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"belief must lie in [0, 1], got {mu!r}")
    if mu == 0.0:
        return -INF
    if mu == 1.0:
        return INF
    return math.log(mu / (1.0 - mu))


@dataclass(frozen=True)
class ModelParams:
    """Rates of the signal technology and the discount rate.

    ``lam`` is the informativeness of effort (the amount by which full effort
    reduces the signal rate), ``d`` the common baseline signal rate, and
    ``d_good`` / ``d_bad`` optional type-dependent baseline rates.  When the
    type-dependent rates are omitted they default to ``d`` (the symmetric
    benchmark).
    """

    lam: float
    r: float
    d: float = 0.0
    d_good: float | None = None
    d_bad: float | None = None

    def __post_init__(self) -> None:
        if self.d_good is None:
            object.__setattr__(self, "d_good", self.d)
        if self.d_bad is None:
            object.__setattr__(self, "d_bad", self.d)
        if not self.lam > 0:
            raise ValueError(f"lam must be > 0, got {self.lam!r}")
        if not self.r > 0:
            raise ValueError(f"r must be > 0, got {self.r!r}")
        for name in ("d", "d_good", "d_bad"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @property
    def symmetric(self) -> bool:
        """True when both types share the common baseline rate ``d``."""
        return self.d_good == self.d_bad == self.d

    def baseline(self, type_tag: str) -> float:
        return self.d_good if type_tag == GOOD else self.d_bad

    def signal_rate(self, e: float, type_tag: str) -> float:
        """Poisson signal rate for a sender of ``type_tag`` exerting effort ``e``."""
        _check_effort(e)
        return self.lam * (1.0 - e) + self.baseline(type_tag)

    @property
    def majorant_rate(self) -> float:
        """Upper bound on the signal rate, used as the thinning majorant."""
        return self.lam + max(self.d_good, self.d_bad)


@dataclass(frozen=True)
class CostFn:
    """Flow effort cost ``a * e + b * e**2`` on [0, 1].

    Strictly increasing (``a > 0`` or ``b > 0``), convex (``b >= 0``) and
    zero at zero effort.  Linear costs (``b == 0``) make the sender
    indifferent over effort at the interior optimum; strictly convex costs
    pin the optimum through the first-order condition.
    """

    a: float
    b: float = 0.0

    def __post_init__(self) -> None:
        if self.a < 0 or self.b < 0:
            raise ValueError("cost coefficients must be >= 0")
        if self.a == 0 and self.b == 0:
            raise ValueError("cost must be strictly increasing: need a > 0 or b > 0")

    def __call__(self, e: float) -> float:
        _check_effort(e)
        return self.a * e + self.b * e * e

    def marginal(self, e: float) -> float:
        _check_effort(e)
        return self.a + 2.0 * self.b * e

    @property
    def linear(self) -> bool:
        return self.b == 0.0


@dataclass(frozen=True)
class CostPair:
    """The two types' cost functions, good first."""

    good: CostFn
    bad: CostFn

    def for_type(self, type_tag: str) -> CostFn:
        return self.good if type_tag == GOOD else self.bad

    def strong_single_crossing(self) -> bool:
        """Every good-type marginal cost lies below every bad-type marginal cost."""
        return self.good.marginal(1.0) < self.bad.marginal(0.0)


@dataclass(frozen=True)
class BenefitFn:
    """Flow benefit ``m + s * logistic(l - k)`` of the market's log odds.

    Strictly increasing, bounded between ``beta_min = m`` and
    ``beta_max = m + s``, and smooth.  Evaluation at +/-inf returns the
    bounds exactly.
    """

    k: float = 0.0
    m: float = 0.0
    s: float = 1.0

    def __post_init__(self) -> None:
        if not self.s > 0:
            raise ValueError("s must be > 0 for a strictly increasing benefit")

    @property
    def beta_min(self) -> float:
        return self.m

    @property
    def beta_max(self) -> float:
        return self.m + self.s

    @property
    def spread(self) -> float:
        return self.s

    @property
    def family(self) -> str:
        return "shifted-logistic" if (self.m == 0.0 and self.s == 1.0) else "affine-logistic"

    def __call__(self, l: float) -> float:
        if l == INF:
            return self.beta_max
        if l == -INF:
            return self.beta_min
        x = l - self.k
        if x >= 0.0:
            p = 1.0 / (1.0 + math.exp(-x))
        else:
            z = math.exp(x)
            p = z / (1.0 + z)
        return self.m + self.s * p


def jump_target(l: float, e_good_star: float, e_bad_star: float, params: ModelParams) -> float:
    """Post-signal log likelihood ratio, given the efforts the market expects.

    A signal multiplies the likelihood ratio by the ratio of the expected
    signal rates of the two types.  When both rates vanish the ratio is
    resolved as 1 (Bayes' rule extended to null events), so ``l`` is
    unchanged; the states ``l = +/-inf`` are absorbing regardless of the
    signal.
    """
    _check_effort(e_good_star, "e_good_star")
    _check_effort(e_bad_star, "e_bad_star")
    if l == INF or l == -INF:
        return l
    num = params.lam * (1.0 - e_good_star) + params.d_good
    den = params.lam * (1.0 - e_bad_star) + params.d_bad
    if num == 0.0 and den == 0.0:
        return l
    if num == 0.0:
        return -INF
    if den == 0.0:
        return INF
    return l + math.log(num / den)


def drift(e_good_star: float, e_bad_star: float, params: ModelParams) -> float:
    """Deterministic rate of change of the log likelihood ratio between signals.

    Absence of a signal is evidence toward whichever type was expected to
    emit fewer signals, so the log odds move at
    ``lam * (e_good_star - e_bad_star) - d_good + d_bad`` per unit time.
    """
    _check_effort(e_good_star, "e_good_star")
    _check_effort(e_bad_star, "e_bad_star")
    return params.lam * (e_good_star - e_bad_star) - params.d_good + params.d_bad
