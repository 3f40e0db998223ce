"""Simulation-based validation: value estimates, deviation tests, reputation stats.

The analytic layer proves best responses pointwise; this layer is the
independent safety net.  It estimates discounted payoffs from simulated
paths, tests a fixed library of Markov deviations with common random
numbers, and measures where reputations end up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import BAD, GOOD, BenefitFn, CostPair, ModelParams, belief_from_log_odds
from .strategy import Region, RegionKind, StrategyProfile
from .dynamics import EffortPolicy, PathEnsemble, ensemble, profile_policy
from .values import ValueTable


@dataclass(frozen=True)
class DeviationSpec:
    """A Markov effort override for one type.

    kinds: "constant" plays ``effort`` everywhere, "swap" plays the other
    type's profile effort, "table" interpolates ``(table_l, table_e)``.
    """

    type_tag: str
    kind: str
    label: str
    effort: float | None = None
    table_l: tuple[float, ...] | None = None
    table_e: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "swap", "table"):
            raise ValueError(f"unknown deviation kind {self.kind!r}")
        if self.kind == "constant":
            if self.effort is None or not 0.0 <= self.effort <= 1.0:
                raise ValueError("constant deviation needs an effort in [0, 1]")
        if self.kind == "table":
            if self.table_l is None or self.table_e is None:
                raise ValueError("table deviation needs sample points")
            if any(not 0.0 <= e <= 1.0 for e in self.table_e):
                raise ValueError("table efforts must lie in [0, 1]")

    def policy(self) -> EffortPolicy:
        if self.kind == "constant":
            e = float(self.effort)

            def fn(l: float, region: Region) -> float:
                return e

            return EffortPolicy(fn, label=self.label, many=lambda ls, region: np.full(len(ls), e))
        if self.kind == "swap":
            return profile_policy(BAD if self.type_tag == GOOD else GOOD)
        tl = np.asarray(self.table_l, dtype=float)
        te = np.asarray(self.table_e, dtype=float)

        def fn(l: float, region: Region) -> float:
            return float(np.interp(l, tl, te))

        return EffortPolicy(
            fn, label=self.label, region_constant=False,
            many=lambda ls, region: np.interp(ls, tl, te),
        )


def standard_deviation_library(type_tag: str) -> list[DeviationSpec]:
    """Constant efforts 0, 1/4, 1/2, 3/4, 1 plus playing the other type's rule."""
    specs = [
        DeviationSpec(type_tag, "constant", f"e={q}", effort=q)
        for q in (0.0, 0.25, 0.5, 0.75, 1.0)
    ]
    specs.append(DeviationSpec(type_tag, "swap", "swap-types"))
    return specs


@dataclass
class ValueEstimate:
    mean: float
    stderr: float
    tail_bound: float
    n_paths: int
    horizon: float

    def consistent_with(self, value: float, sigmas: float = 3.0) -> bool:
        return abs(self.mean - value) <= sigmas * self.stderr + self.tail_bound


def tail_bound(params: ModelParams, benefit: BenefitFn, horizon: float) -> float:
    """Truncation error bound for a finite-horizon payoff estimate."""
    return math.exp(-params.r * horizon) * (benefit.beta_max - benefit.beta_min) / params.r


def horizon_for_tail(params: ModelParams, benefit: BenefitFn, rel_tail: float = 1e-3) -> float:
    """Horizon making the truncation bound a ``rel_tail`` fraction of the value range."""
    return math.log(1.0 / rel_tail) / params.r


def estimate_value(
    profile: StrategyProfile,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    type_tag: str,
    l0: float,
    horizon: float,
    n_paths: int,
    seed: int,
    workers: int = 1,
) -> ValueEstimate:
    """Monte Carlo estimate of the type's equilibrium value at ``l0``."""
    if n_paths < 2:
        raise ValueError("need n_paths >= 2 for a standard error")
    ens = ensemble(
        l0, profile, params, benefit, costs, type_tag, horizon, n_paths, seed,
        keep_paths=False, workers=workers,
    )
    mean = float(np.mean(ens.payoffs))
    stderr = float(np.std(ens.payoffs, ddof=1) / math.sqrt(n_paths))
    return ValueEstimate(mean, stderr, tail_bound(params, benefit, horizon), n_paths, horizon)


@dataclass
class DeviationResult:
    spec: DeviationSpec
    gain: float            # paired mean of J(deviation) - J(profile), common random numbers
    stderr: float          # standard error of the paired differences
    gain_vs_value: float   # mean J(deviation) - table value at l0
    stderr_marginal: float
    tail_bound: float

    def profitable(self, sigmas: float = 3.0) -> bool:
        return self.gain > sigmas * self.stderr + self.tail_bound


def deviation_test(
    profile: StrategyProfile,
    table: ValueTable,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    deviations: list[DeviationSpec],
    l0: float,
    horizon: float,
    n_paths: int,
    seed: int,
    workers: int = 1,
) -> list[DeviationResult]:
    """Estimate deviation gains against the on-path strategy.

    Every deviation is paired with an on-path run using the same seeds
    (common random numbers), so the reported gain is the paired-difference
    mean.  Equilibrium consistency requires every gain to stay below
    ``3 * stderr + tail``.
    """
    results: list[DeviationResult] = []
    baselines: dict[str, PathEnsemble] = {}
    tail = tail_bound(params, benefit, horizon)
    for spec in deviations:
        tag = spec.type_tag
        if tag not in baselines:
            baselines[tag] = ensemble(
                l0, profile, params, benefit, costs, tag, horizon, n_paths, seed,
                keep_paths=False, workers=workers,
            )
        base = baselines[tag]
        dev = ensemble(
            l0, profile, params, benefit, costs, tag, horizon, n_paths, seed,
            deviation=spec.policy(), keep_paths=False, workers=workers,
        )
        diffs = dev.payoffs - base.payoffs
        n = len(diffs)
        results.append(
            DeviationResult(
                spec=spec,
                gain=float(np.mean(diffs)),
                stderr=float(np.std(diffs, ddof=1) / math.sqrt(n)),
                gain_vs_value=float(np.mean(dev.payoffs)) - table.value(l0, tag),
                stderr_marginal=float(np.std(dev.payoffs, ddof=1) / math.sqrt(n)),
                tail_bound=tail,
            )
        )
    return results


@dataclass
class ReputationStats:
    """Terminal-reputation outcomes relative to the starting log odds."""

    l_threshold: float
    horizon: float
    n_paths: int
    prob_bad_above: float
    se_bad_above: float
    prob_good_below: float
    se_good_below: float
    mean_terminal_belief_good: float
    se_terminal_belief_good: float
    mean_terminal_belief_bad: float
    se_terminal_belief_bad: float
    permanent_interpretation: bool


def reputation_stats(
    profile: StrategyProfile,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    l0: float,
    horizon: float,
    n_paths: int,
    seed: int,
    workers: int = 1,
) -> ReputationStats:
    """Wrong-reputation probabilities: the bad type ending above the start,
    the good type ending below it, each with binomial standard errors.

    The permanent-reputation reading applies when both baseline rates are
    positive (beliefs never reach certainty); otherwise these are plain
    terminal-distribution statistics.
    """

    def binom_se(p: float, n: int) -> float:
        return math.sqrt(max(p * (1.0 - p), 0.0) / n)

    out = {}
    for tag, offset in ((GOOD, 0), (BAD, 1)):
        ens = ensemble(
            l0, profile, params, benefit, costs, tag, horizon, n_paths, seed + offset,
            keep_paths=False, workers=workers,
        )
        beliefs = np.array([belief_from_log_odds(float(l)) for l in ens.terminal_l])
        out[tag] = (ens.terminal_l, beliefs)
    good_l, good_mu = out[GOOD]
    bad_l, bad_mu = out[BAD]
    p_bad_above = float(np.mean(bad_l > l0))
    p_good_below = float(np.mean(good_l < l0))
    return ReputationStats(
        l_threshold=l0,
        horizon=horizon,
        n_paths=n_paths,
        prob_bad_above=p_bad_above,
        se_bad_above=binom_se(p_bad_above, n_paths),
        prob_good_below=p_good_below,
        se_good_below=binom_se(p_good_below, n_paths),
        mean_terminal_belief_good=float(np.mean(good_mu)),
        se_terminal_belief_good=float(np.std(good_mu, ddof=1) / math.sqrt(n_paths)),
        mean_terminal_belief_bad=float(np.mean(bad_mu)),
        se_terminal_belief_bad=float(np.std(bad_mu, ddof=1) / math.sqrt(n_paths)),
        permanent_interpretation=(params.d_good > 0 and params.d_bad > 0),
    )
