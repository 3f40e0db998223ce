"""Belief-path dynamics: deterministic flow and stochastic signal simulation.

Between signals the log likelihood ratio follows the deterministic drift
of the expected profile; at signal times it jumps by the public updating
rule.  Signals are drawn by thinning against the constant majorant rate
``lam + max(d_good, d_bad)``, which is exact for intensities that vary
along the path.  Paths terminate early (with the remaining flow accrued
in closed form) once the state is frozen, i.e. the drift vanishes and
signals no longer move the belief.

Stasis boundaries are absorbing for the flow while the signal clock keeps
running with the occupancy-weighted mixture of the two adjacent regions'
rates and jump targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    BAD,
    GOOD,
    INF,
    BenefitFn,
    CostFn,
    CostPair,
    ModelParams,
    belief_from_log_odds,
    drift,
    jump_target,
)
from .strategy import Region, RegionKind, StrategyProfile, stasis_points

_UNIT_COST = CostFn(a=1.0)

_BENEFIT_SATURATION = 45.0  # |l - k| beyond which the benefit is flat to ~3e-20


class EffortPolicy:
    """Markov effort rule for the sender's own play (on-path or a deviation).

    ``region_constant`` marks policies whose effort is constant within any
    non-switched region; this enables skipping certain-rejection stretches
    when the policy makes the signal intensity exactly zero.
    """

    def __init__(self, fn, label: str = "", region_constant: bool = True, many=None):
        self._fn = fn
        self._many = many
        self.label = label
        self.region_constant = region_constant

    def __call__(self, l: float, region: Region) -> float:
        return self._fn(l, region)

    def many(self, ls: np.ndarray, region: Region) -> np.ndarray:
        if self._many is not None:
            return self._many(ls, region)
        return np.array([self._fn(float(l), region) for l in ls])


def profile_policy(type_tag: str) -> EffortPolicy:
    """Play the profile's own prescribed effort."""
    idx = 0 if type_tag == GOOD else 1

    def fn(l: float, region: Region) -> float:
        return region.efforts(l)[idx]

    def many(ls: np.ndarray, region: Region) -> np.ndarray:
        if region.kind is RegionKind.SWITCHED:
            if idx == 0:
                return np.zeros(len(ls))
            return np.interp(ls, region.table_l, region.table_e)
        e = region.efforts(float(ls[0]))[idx] if len(ls) else 0.0
        return np.full(len(ls), e)

    return EffortPolicy(fn, label=f"profile[{type_tag}]", many=many)


@dataclass
class SimPath:
    """One realized reputation path.

    ``samples`` holds (time, log-odds) anchors: the start, the state right
    after every accepted signal, and the terminal time.  Between anchors
    the path follows the deterministic flow, so the trajectory is fully
    reconstructible.  ``payoff`` is the discounted flow integral over
    [0, horizon]; ``tail_value`` records exp(-r T) * beta(l_T) / r
    separately.
    """

    seed: int
    type_tag: str
    horizon: float
    event_times: list[float]
    samples: list[tuple[float, float]]
    payoff: float
    tail_value: float
    terminal_l: float
    n_proposals: int


@dataclass
class PathEnsemble:
    """A batch of independent paths with summary arrays."""

    l_start: float
    horizon: float
    mode: str  # "G", "B" or "mixture"
    paths: list[SimPath]
    payoffs: np.ndarray
    terminal_l: np.ndarray
    tail_values: np.ndarray
    types: np.ndarray
    n_events: np.ndarray

    def summary(self) -> dict:
        payoffs = self.payoffs
        beliefs = np.array([belief_from_log_odds(float(l)) for l in self.terminal_l])
        hist, edges = np.histogram(beliefs, bins=20, range=(0.0, 1.0))
        n = len(payoffs)
        return {
            "n_paths": n,
            "mean_payoff": float(np.mean(payoffs)),
            "var_payoff": float(np.var(payoffs, ddof=1)) if n > 1 else 0.0,
            "stderr_payoff": float(np.std(payoffs, ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
            "mean_terminal_belief": float(np.mean(beliefs)),
            "stderr_terminal_belief": float(np.std(beliefs, ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
            "fraction_good": float(np.mean(self.types == GOOD)),
            "terminal_belief_histogram": (hist.tolist(), edges.tolist()),
        }


def _simpson(ys: np.ndarray, h: float) -> float:
    n = len(ys) - 1  # even by construction
    return (h / 3.0) * float(ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-1:2].sum())


class _SwitchedFlowTable:
    """Travel times through a switched region, where the drift varies with l."""

    def __init__(self, region: Region, params: ModelParams):
        z = np.asarray(region.table_l, dtype=float)
        e = np.asarray(region.table_e, dtype=float)
        speed = params.lam * e + params.d_good - params.d_bad  # downward speed
        if np.any(speed <= 0.0):
            raise ValueError("switched-region flow requires a strictly downward drift")
        self.z = z
        self.speed = speed
        inv = 1.0 / speed
        self.tau = np.concatenate(([0.0], np.cumsum(0.5 * (inv[1:] + inv[:-1]) * np.diff(z))))

    def time_to_lower(self, z_from: float) -> float:
        return float(np.interp(z_from, self.z, self.tau))

    def position_after(self, z_from: float, elapsed: float) -> float:
        target = self.time_to_lower(z_from) - elapsed
        if target <= 0.0:
            return float(self.z[0])
        return float(np.interp(target, self.tau, self.z))

    def speed_at(self, z: float) -> float:
        return float(np.interp(z, self.z, self.speed))


class PathKernel:
    """Precomputed flow/payoff machinery for one (profile, params) pair.

    Shared across the paths of an ensemble; everything here is immutable
    after construction.
    """

    def __init__(
        self,
        profile: StrategyProfile,
        params: ModelParams,
        benefit: BenefitFn,
        costs: CostPair,
        type_tag: str,
        policy: EffortPolicy | None = None,
    ):
        self.profile = profile
        self.params = params
        self.benefit = benefit
        self.type_tag = type_tag
        self.cost = costs.for_type(type_tag)
        self.policy = policy or profile_policy(type_tag)
        self.stasis = dict(stasis_points(profile, params))
        self._flow_tables: dict[int, _SwitchedFlowTable] = {}
        for idx, region in enumerate(profile.regions):
            if region.kind is RegionKind.SWITCHED:
                self._flow_tables[idx] = _SwitchedFlowTable(region, params)

    # -- state classification ------------------------------------------------

    def _region_index(self, l: float) -> int:
        for idx, region in enumerate(self.profile.regions):
            if region.contains(l):
                return idx
        raise RuntimeError(f"profile does not cover l={l!r}")

    def _sides_at(self, l: float) -> tuple[Region, Region]:
        """Regions immediately left and right of a boundary point."""
        regions = self.profile.regions
        left = right = regions[self._region_index(l)]
        for i, region in enumerate(regions):
            if region.upper == l:
                left = region
                right = regions[min(i + 1, len(regions) - 1)]
                break
            if region.lower == l:
                right = region
                left = regions[max(i - 1, 0)]
                break
        return left, right

    def is_frozen(self, l: float) -> bool:
        """True when neither drift nor signals can ever move the belief again."""
        if l == INF or l == -INF:
            return True
        if l in self.stasis:
            # pinned by the flow; signals move the belief only if a side with
            # positive occupancy-weighted own intensity has a non-trivial jump
            w = self.stasis[l]
            left, right = self._sides_at(l)
            j_left = jump_target(l, *left.efforts(l), self.params)
            j_right = jump_target(l, *right.efforts(l), self.params)
            move_rate = 0.0
            if j_left != l:
                move_rate += w * self._rate(self.policy(l, left))
            if j_right != l:
                move_rate += (1.0 - w) * self._rate(self.policy(l, right))
            return move_rate == 0.0
        region = self.profile.regions[self._region_index(l)]
        return drift(*region.efforts(l), self.params) == 0.0

    # -- own signal intensity and jumps ---------------------------------------

    def _rate(self, e_own: float) -> float:
        return self.params.lam * (1.0 - e_own) + self.params.baseline(self.type_tag)

    def intensity_and_jump_draws(self, l: float):
        """Own signal intensity at ``l`` plus the data needed to jump.

        Returns (intensity, chooser) where chooser(u) maps a uniform draw
        to the post-signal log odds.  At a stasis boundary the intensity is
        the occupancy-weighted mixture of the two sides and the side of the
        jump is drawn in proportion to each side's share of signals.
        """
        params = self.params
        if l in self.stasis:
            w = self.stasis[l]
            left, right = self._sides_at(l)
            i_left = self._rate(self.policy(l, left))
            i_right = self._rate(self.policy(l, right))
            total = w * i_left + (1.0 - w) * i_right
            j_left = jump_target(l, *left.efforts(l), params)
            j_right = jump_target(l, *right.efforts(l), params)

            def chooser(u: float) -> float:
                if total <= 0.0:
                    return l
                return j_left if u * total < w * i_left else j_right

            return total, chooser
        region = self.profile.regions[self._region_index(l)]
        intensity = self._rate(self.policy(l, region))
        j = jump_target(l, *region.efforts(l), params)

        def chooser(_u: float) -> float:
            return j

        return intensity, chooser

    def stasis_cost_rate(self, l: float) -> float:
        """Occupancy-weighted own flow cost while pinned at a stasis point."""
        w = self.stasis[l]
        left, right = self._sides_at(l)
        return w * self.cost(self.policy(l, left)) + (1.0 - w) * self.cost(self.policy(l, right))

    # -- payoff pieces ---------------------------------------------------------

    def _flat_payoff(self, t0: float, dt: float, flow: float) -> float:
        r = self.params.r
        return flow * (math.exp(-r * t0) - math.exp(-r * (t0 + dt))) / r

    def _linear_segment_payoff(self, t0, dt, l_start, mu, region) -> float:
        """Discounted flow over a constant-drift segment, split at benefit saturation."""
        if dt <= 0.0:
            return 0.0
        benefit = self.benefit
        k = benefit.k
        e_const = self.policy(l_start, region) if self.policy.region_constant else None
        if mu == 0.0:
            flow = benefit(l_start) - self.cost(self.policy(l_start, region))
            return self._flat_payoff(t0, dt, flow)
        # time at which the benefit saturates along the motion
        if mu > 0.0:
            t_sat = (k + _BENEFIT_SATURATION - l_start) / mu
            beta_flat = benefit.beta_max
        else:
            t_sat = (k - _BENEFIT_SATURATION - l_start) / mu
            beta_flat = benefit.beta_min
        total = 0.0
        t_num = dt
        if e_const is not None and t_sat < dt:
            t_num = max(t_sat, 0.0)
            total += self._flat_payoff(t0 + t_num, dt - t_num, beta_flat - self.cost(e_const))
        if t_num > 0.0:
            n = int(min(20000, max(8, math.ceil(t_num / 0.05))))
            if n % 2:
                n += 1
            ts = np.linspace(0.0, t_num, n + 1)
            ls = l_start + mu * ts
            x = ls - k
            betas = np.where(
                x >= 0, 1.0 / (1.0 + np.exp(-np.minimum(x, 700.0))),
                np.exp(np.maximum(x, -700.0)) / (1.0 + np.exp(np.maximum(x, -700.0))),
            )
            betas = benefit.m + benefit.s * betas
            if e_const is not None:
                cost_flow = self.cost(e_const)
            else:
                es = self.policy.many(ls, region)
                cost_flow = self.cost.a * es + self.cost.b * es * es
            integrand = np.exp(-self.params.r * (t0 + ts)) * (betas - cost_flow)
            total += _simpson(integrand, float(ts[1] - ts[0]))
        return total

    def _switched_segment_payoff(self, t0, z_from, z_to, idx) -> float:
        """Discounted flow while drifting down through a switched region."""
        if z_from <= z_to:
            return 0.0
        table = self._flow_tables[idx]
        region = self.profile.regions[idx]
        inner = (table.z > z_to) & (table.z < z_from)
        zs = np.concatenate(([z_to], table.z[inner], [z_from]))
        taus = np.interp(zs, table.z, table.tau)
        speeds = np.interp(zs, table.z, table.speed)
        ts = t0 + float(taus[-1]) - taus
        x = zs - self.benefit.k
        betas = self.benefit.m + self.benefit.s * (
            np.where(x >= 0, 1.0 / (1.0 + np.exp(-x)), np.exp(x) / (1.0 + np.exp(x)))
        )
        es = self.policy.many(zs, region)
        costs_flow = self.cost.a * es + self.cost.b * es * es
        integrand = np.exp(-self.params.r * ts) * (betas - costs_flow) / speeds
        return float(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(zs)))

    # -- deterministic flow ------------------------------------------------

    def advance(self, t: float, l: float, budget: float, single_segment: bool = False):
        """Flow forward for ``budget`` time units; no signals.

        Returns (t_new, l_new, payoff_increment).  The integration is
        event-located: each segment ends exactly at a region boundary, a
        stasis point, or when the budget runs out.
        """
        payoff = 0.0
        remaining = budget
        guard = 0
        while remaining > 1e-15:
            guard += 1
            if guard > 10_000:
                raise RuntimeError("flow failed to progress; malformed profile?")
            if l == INF or l == -INF:
                flow = self.benefit(l) - self.cost(self.policy(l, self.profile.regions[0]))
                payoff += self._flat_payoff(t, remaining, flow)
                t += remaining
                remaining = 0.0
                break
            if l in self.stasis:
                flow = self.benefit(l) - self.stasis_cost_rate(l)
                payoff += self._flat_payoff(t, remaining, flow)
                t += remaining
                remaining = 0.0
                break
            idx = self._region_index(l)
            region = self.profile.regions[idx]
            mu = drift(*region.efforts(l), self.params)
            if mu == 0.0:
                flow = self.benefit(l) - self.cost(self.policy(l, region))
                payoff += self._flat_payoff(t, remaining, flow)
                t += remaining
                remaining = 0.0
                break
            if region.kind is RegionKind.SWITCHED:
                table = self._flow_tables[idx]
                t_hit = table.time_to_lower(l)
                dt_seg = min(t_hit, remaining)
                l_new = region.lower if dt_seg >= t_hit else table.position_after(l, dt_seg)
                payoff += self._switched_segment_payoff(t, l, l_new, idx)
            else:
                target = region.upper if mu > 0.0 else region.lower
                t_hit = (target - l) / mu if math.isfinite(target) else INF
                dt_seg = min(t_hit, remaining)
                l_new = target if dt_seg >= t_hit else l + mu * dt_seg
                payoff += self._linear_segment_payoff(t, dt_seg, l, mu, region)
            t += dt_seg
            remaining -= dt_seg
            l = float(l_new)
            if single_segment:
                break
        return t, l, payoff


def flow_deterministic(
    l0: float,
    profile: StrategyProfile,
    params: ModelParams,
    dt: float,
) -> float:
    """Evolve the log odds for ``dt`` time units with no signals.

    Region boundaries are located exactly and stasis points absorb the
    flow for the remaining time.
    """
    if dt < 0:
        raise ValueError("dt must be >= 0")
    if dt == 0.0:
        return l0
    kernel = PathKernel(
        profile, params, BenefitFn(), CostPair(good=_UNIT_COST, bad=_UNIT_COST), GOOD,
        policy=EffortPolicy(lambda l, region: 0.0, label="zero"),
    )
    _, l_new, _ = kernel.advance(0.0, l0, dt)
    return l_new


def simulate_path(
    l0: float,
    profile: StrategyProfile,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    type_tag: str,
    horizon: float,
    seed: int,
    deviation: EffortPolicy | None = None,
    kernel: PathKernel | None = None,
) -> SimPath:
    """Simulate one path of the public belief for a sender of ``type_tag``.

    Signals are thinned against the majorant rate; the belief is updated
    with the market-expected profile (a deviation changes the sender's own
    signal intensity and cost, never the market's updating rule).  The
    realized payoff integrates discounted flow over [0, horizon] by
    event-located quadrature with closed forms on frozen stretches.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if kernel is None:
        kernel = PathKernel(profile, params, benefit, costs, type_tag, policy=deviation)
    rng = np.random.default_rng(seed)
    majorant = params.majorant_rate
    exp_block: list[float] = []
    uni_block: list[float] = []

    def next_exp() -> float:
        if not exp_block:
            exp_block.extend(rng.exponential(1.0, size=256).tolist())
        return exp_block.pop()

    def next_uniform() -> float:
        if not uni_block:
            uni_block.extend(rng.random(size=256).tolist())
        return uni_block.pop()

    t, l = 0.0, float(l0)
    payoff = 0.0
    events: list[float] = []
    samples: list[tuple[float, float]] = [(0.0, l)]
    proposals = 0
    while t < horizon:
        if kernel.is_frozen(l):
            _, _, inc = kernel.advance(t, l, horizon - t)
            payoff += inc
            t = horizon
            break
        if l not in kernel.stasis:
            region = profile.regions[kernel._region_index(l)]
            if (
                region.kind is not RegionKind.SWITCHED
                and kernel.policy.region_constant
                and kernel._rate(kernel.policy(l, region)) == 0.0
            ):
                # certain rejection while the intensity is exactly zero:
                # skip ahead one flow segment without drawing proposals
                t, l, inc = kernel.advance(t, l, horizon - t, single_segment=True)
                payoff += inc
                continue
        gap = next_exp() / majorant
        proposals += 1
        if t + gap >= horizon:
            _, l, inc = kernel.advance(t, l, horizon - t)
            payoff += inc
            t = horizon
            break
        t, l, inc = kernel.advance(t, l, gap)
        payoff += inc
        intensity, chooser = kernel.intensity_and_jump_draws(l)
        if next_uniform() * majorant <= intensity:
            events.append(t)
            l = chooser(next_uniform())
            samples.append((t, l))
    samples.append((horizon, l))
    tail = math.exp(-params.r * horizon) * benefit(l) / params.r
    return SimPath(
        seed=seed,
        type_tag=type_tag,
        horizon=horizon,
        event_times=events,
        samples=samples,
        payoff=payoff,
        tail_value=tail,
        terminal_l=l,
        n_proposals=proposals,
    )


def ensemble(
    l0: float,
    profile: StrategyProfile,
    params: ModelParams,
    benefit: BenefitFn,
    costs: CostPair,
    type_tag: str | None,
    horizon: float,
    n_paths: int,
    base_seed: int,
    deviation: EffortPolicy | None = None,
    keep_paths: bool = True,
    workers: int = 1,
) -> PathEnsemble:
    """Independent paths with seeds derived from ``base_seed``.

    ``type_tag=None`` runs mixture mode: each path's type is drawn from the
    prior belief implied by ``l0``.  ``workers > 1`` runs path chunks on a
    thread pool; results land in preallocated slots by path index, so the
    output is identical for every worker count.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    ss = np.random.SeedSequence(base_seed)
    path_seeds = ss.generate_state(n_paths, dtype=np.uint64)
    if type_tag is None:
        mu0 = belief_from_log_odds(l0)
        type_rng = np.random.default_rng(ss.spawn(1)[0])
        tags = np.where(type_rng.random(n_paths) < mu0, GOOD, BAD)
        mode = "mixture"
    else:
        tags = np.full(n_paths, type_tag)
        mode = type_tag
    kernels = {}
    for tag in np.unique(tags):
        kernels[str(tag)] = PathKernel(profile, params, benefit, costs, str(tag), policy=deviation)
    paths: list[SimPath | None] = [None] * n_paths if keep_paths else []
    payoffs = np.empty(n_paths)
    terminal = np.empty(n_paths)
    tails = np.empty(n_paths)
    n_events = np.empty(n_paths, dtype=np.int64)

    def run_chunk(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            tag = str(tags[i])
            path = simulate_path(
                l0, profile, params, benefit, costs, tag, horizon,
                seed=int(path_seeds[i]), deviation=deviation, kernel=kernels[tag],
            )
            payoffs[i] = path.payoff
            terminal[i] = path.terminal_l
            tails[i] = path.tail_value
            n_events[i] = len(path.event_times)
            if keep_paths:
                paths[i] = path

    workers = max(1, int(workers))
    if workers == 1 or n_paths < 2 * workers:
        run_chunk(0, n_paths)
    else:
        from concurrent.futures import ThreadPoolExecutor

        bounds = np.linspace(0, n_paths, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(run_chunk, int(bounds[k]), int(bounds[k + 1]))
                for k in range(workers)
            ]
            for fut in futures:
                fut.result()
    return PathEnsemble(
        l_start=l0,
        horizon=horizon,
        mode=mode,
        paths=paths,
        payoffs=payoffs,
        terminal_l=terminal,
        tail_values=tails,
        types=tags,
        n_events=n_events,
    )
