"""Belief-path dynamics: deterministic flow, thinning simulation, ensembles."""

import math

import numpy as np
import pytest

from signalflow.model import (
    BAD,
    GOOD,
    INF,
    BenefitFn,
    CostFn,
    CostPair,
    ModelParams,
    belief_from_log_odds,
    jump_target,
)
from signalflow.strategy import (
    Region,
    RegionKind,
    StrategyProfile,
    effort_at,
    extremal_profile,
    pooling_profile,
)
from signalflow.dynamics import ensemble, flow_deterministic, simulate_path


def custom_profile(e_good: float, e_bad: float) -> StrategyProfile:
    region = Region(-INF, INF, RegionKind.CUSTOM, closed_left=True, closed_right=True,
                    e_good=e_good, e_bad=e_bad)
    return StrategyProfile(regions=(region,))


class TestDeterministicFlow:
    def test_pooling_region_is_still(self):
        params = ModelParams(lam=2.0, r=0.01, d=0.0)
        assert flow_deterministic(1.2, pooling_profile(), params, 7.0) == 1.2

    def test_constant_drift_hits_the_boundary_exactly(self):
        # watch region [0, 1): drift +2 for half a time unit lands on the edge
        params = ModelParams(lam=2.0, r=0.01, d=0.0)
        prof = extremal_profile(0.0, 1.0)
        assert flow_deterministic(0.0, prof, params, 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_boundary_region_switch_is_event_located(self):
        params = ModelParams(lam=2.0, r=0.01, d=0.0)
        prof = extremal_profile(0.0, 1.0)
        # after the boundary the pooling drift is zero, so the flow parks there
        assert flow_deterministic(0.0, prof, params, 3.0) == pytest.approx(1.0, abs=1e-12)

    def test_switched_region_flows_down_to_stasis(self, fig3, fig3_solution):
        prof = fig3_solution.profile
        out = flow_deterministic(0.2, prof, fig3.params, 100.0)
        assert out == pytest.approx(fig3.l_under, abs=1e-9)

    def test_zero_duration_is_identity(self, fig3, fig3_solution):
        assert flow_deterministic(0.1, fig3_solution.profile, fig3.params, 0.0) == 0.1

    def test_negative_duration_rejected(self, fig3, fig3_solution):
        with pytest.raises(ValueError):
            flow_deterministic(0.1, fig3_solution.profile, fig3.params, -1.0)


class TestSimulatePath:
    def test_pooling_payoff_closed_form(self):
        params = ModelParams(lam=2.0, r=0.01, d=0.0)
        benefit = BenefitFn(k=4.2)
        costs = CostPair(good=CostFn(a=0.1), bad=CostFn(a=1.0))
        path = simulate_path(0.5, pooling_profile(), params, benefit, costs, BAD, 10.0, seed=3)
        expect = (1.0 - math.exp(-0.1)) * benefit(0.5) / 0.01
        assert path.payoff == pytest.approx(expect, rel=1e-12)
        assert path.event_times == []
        assert path.terminal_l == 0.5

    def test_replay_is_bit_identical(self, fig3, fig3_solution):
        prof = fig3_solution.profile
        p1 = simulate_path(0.2, prof, fig3.params, fig3.benefit, fig3.costs, BAD, 500.0, seed=123)
        p2 = simulate_path(0.2, prof, fig3.params, fig3.benefit, fig3.costs, BAD, 500.0, seed=123)
        assert p1 == p2

    def test_pooled_expectations_freeze_every_path(self):
        params = ModelParams(lam=2.0, r=0.1, d=0.3)
        benefit = BenefitFn(k=0.0)
        costs = CostPair(good=CostFn(a=0.1), bad=CostFn(a=1.0))
        prof = custom_profile(0.4, 0.4)
        for seed in range(5):
            path = simulate_path(0.7, prof, params, benefit, costs, GOOD, 50.0, seed=seed)
            assert path.terminal_l == 0.7
            assert all(l == 0.7 for _, l in path.samples)

    def test_watch_signal_reveals_and_absorbs(self, fig3, fig3_solution):
        # a signal under watch with a zero baseline rate is conclusive
        prof = fig3_solution.profile
        path = simulate_path(1.0, prof, fig3.params, fig3.benefit, fig3.costs, BAD, 2000.0, seed=11)
        assert path.event_times, "idle bad type should be caught quickly"
        assert path.terminal_l == -INF
        assert path.tail_value == 0.0  # flow benefit after ruin is exactly beta_min = 0

    def test_thinning_acceptance_matches_rate_ratio(self):
        # constant efforts, so the own intensity is flat and the acceptance
        # probability is intensity / majorant
        params = ModelParams(lam=2.0, r=0.05, d=0.5)
        benefit = BenefitFn(k=0.0)
        costs = CostPair(good=CostFn(a=0.1), bad=CostFn(a=1.0))
        prof = custom_profile(0.3, 0.7)
        path = simulate_path(0.0, prof, params, benefit, costs, BAD, 4000.0, seed=21)
        p_accept = (params.lam * (1 - 0.7) + 0.5) / params.majorant_rate
        n = path.n_proposals
        got = len(path.event_times) / n
        assert abs(got - p_accept) <= 3.0 * math.sqrt(p_accept * (1 - p_accept) / n)

    def test_replay_reconstruction_from_samples(self, fig3, fig3_solution):
        prof = fig3_solution.profile
        path = simulate_path(0.2, prof, fig3.params, fig3.benefit, fig3.costs, BAD, 300.0, seed=40)
        assert path.event_times, "need at least one jump for the check"
        for k, t_event in enumerate(path.event_times):
            t_prev, l_prev = path.samples[k]
            l_pre = flow_deterministic(l_prev, prof, fig3.params, t_event - t_prev)
            expect = jump_target(l_pre, *effort_at(prof, l_pre), fig3.params)
            assert path.samples[k + 1][0] == t_event
            assert path.samples[k + 1][1] == pytest.approx(expect, abs=1e-9)

    def test_deviation_changes_only_own_play(self, fig3, fig3_solution):
        from signalflow.dynamics import EffortPolicy

        prof = fig3_solution.profile
        idle = EffortPolicy(lambda l, region: 0.0, label="idle")
        path = simulate_path(0.2, prof, fig3.params, fig3.benefit, fig3.costs, GOOD,
                             300.0, seed=5, deviation=idle)
        # the market still updates with the profile: a watch-region signal
        # must land at -inf exactly as on path
        if any(l == -INF for _, l in path.samples):
            assert path.terminal_l == -INF


class TestEnsembles:
    def test_single_path_wrap(self, fig3, fig3_solution):
        ens = ensemble(0.2, fig3_solution.profile, fig3.params, fig3.benefit, fig3.costs,
                       BAD, 100.0, 1, base_seed=9)
        assert len(ens.paths) == 1
        assert ens.payoffs.shape == (1,)

    def test_mixture_fraction_matches_prior(self, fig3, fig3_solution):
        mu0 = 0.6
        l0 = math.log(mu0 / (1 - mu0))
        ens = ensemble(l0, fig3_solution.profile, fig3.params, fig3.benefit, fig3.costs,
                       None, 50.0, 10_000, base_seed=31, keep_paths=False)
        frac = float(np.mean(ens.types == GOOD))
        assert abs(frac - mu0) <= 3.0 * math.sqrt(mu0 * (1 - mu0) / 10_000)

    def test_posterior_belief_is_a_martingale(self, fig3, fig3_solution):
        l0 = 0.2
        ens = ensemble(l0, fig3_solution.profile, fig3.params, fig3.benefit, fig3.costs,
                       None, 300.0, 30_000, base_seed=77, keep_paths=False)
        s = ens.summary()
        mu0 = belief_from_log_odds(l0)
        z = abs(s["mean_terminal_belief"] - mu0) / s["stderr_terminal_belief"]
        assert z <= 3.0, f"martingale violated: z={z:.2f}"

    def test_martingale_with_rate_asymmetry(self, dpos):
        # short-horizon check on a profile whose pooling regions still move
        delta = 0.01
        params = ModelParams(lam=dpos.params.lam, r=dpos.params.r, d=dpos.params.d,
                             d_good=dpos.params.d - delta, d_bad=dpos.params.d + delta)
        from signalflow.values import switched_value_solve

        res = switched_value_solve(dpos.l_under, dpos.l0, dpos.l1, dpos.l_over,
                                   params, dpos.benefit, dpos.costs, n_steps=400)
        assert res.ok
        l0 = 0.1
        ens = ensemble(l0, res.profile, params, dpos.benefit, dpos.costs,
                       None, 15.0, 20_000, base_seed=13, keep_paths=False)
        s = ens.summary()
        z = abs(s["mean_terminal_belief"] - belief_from_log_odds(l0)) / s["stderr_terminal_belief"]
        assert z <= 3.0, f"martingale violated under rate asymmetry: z={z:.2f}"

    def test_summary_recomputable_from_paths(self, fig3, fig3_solution):
        ens = ensemble(0.2, fig3_solution.profile, fig3.params, fig3.benefit, fig3.costs,
                       BAD, 200.0, 50, base_seed=15)
        assert [p.payoff for p in ens.paths] == list(ens.payoffs)
        assert [p.terminal_l for p in ens.paths] == list(ens.terminal_l)
        assert ens.summary()["mean_payoff"] == pytest.approx(float(np.mean(ens.payoffs)))

    def test_worker_count_does_not_change_results(self, fig3, fig3_solution):
        kwargs = dict(type_tag=BAD, horizon=150.0, n_paths=200, base_seed=8, keep_paths=False)
        a = ensemble(0.2, fig3_solution.profile, fig3.params, fig3.benefit, fig3.costs, **kwargs)
        b = ensemble(0.2, fig3_solution.profile, fig3.params, fig3.benefit, fig3.costs,
                     workers=4, **kwargs)
        assert np.array_equal(a.payoffs, b.payoffs)
        assert np.array_equal(a.terminal_l, b.terminal_l)
