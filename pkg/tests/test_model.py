"""Game primitives: belief updating, drift, costs, benefit."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signalflow.model import (
    BAD,
    GOOD,
    BenefitFn,
    CostFn,
    CostPair,
    ModelParams,
    belief_from_log_odds,
    drift,
    jump_target,
    log_odds_from_belief,
)

INF = math.inf


class TestJumpRule:
    def test_equal_efforts_leave_belief_unchanged(self):
        p = ModelParams(lam=2.0, r=1.0, d=0.5)
        assert jump_target(0.0, 0.3, 0.3, p) == 0.0

    def test_full_effort_gap_reveals_the_bad_type(self):
        # zero baseline rate: a signal under watch is conclusive
        p = ModelParams(lam=2.0, r=1.0, d=0.0)
        assert jump_target(0.0, 1.0, 0.0, p) == -INF

    def test_hand_value_upward_jump(self):
        p = ModelParams(lam=2.0, r=1.0, d=0.0)
        assert jump_target(1.0, 0.0, 0.5, p) == pytest.approx(1.0 + math.log(2.0), abs=1e-12)

    def test_hand_value_downward_jump_with_baseline(self):
        p = ModelParams(lam=2.0, r=1.0, d=0.5)
        assert jump_target(5.0, 1.0, 0.0, p) == pytest.approx(5.0 - math.log(5.0), abs=1e-12)

    def test_zero_over_zero_resolves_to_no_update(self):
        p = ModelParams(lam=2.0, r=1.0, d=0.0)
        assert jump_target(0.7, 1.0, 1.0, p) == 0.7

    def test_certainty_is_absorbing(self):
        p = ModelParams(lam=2.0, r=1.0, d=0.0)
        assert jump_target(INF, 1.0, 0.0, p) == INF
        assert jump_target(-INF, 1.0, 0.0, p) == -INF

    def test_effort_outside_unit_interval_rejected(self):
        p = ModelParams(lam=2.0, r=1.0, d=0.5)
        with pytest.raises(ValueError):
            jump_target(0.0, 1.2, 0.0, p)
        with pytest.raises(ValueError):
            jump_target(0.0, 0.0, -0.1, p)

    @given(
        l=st.floats(-30, 30),
        e=st.floats(0, 1),
        lam=st.floats(0.1, 10),
        d=st.floats(0, 2),
    )
    @settings(max_examples=200, deadline=None)
    def test_identity_under_pooling(self, l, e, lam, d):
        p = ModelParams(lam=lam, r=1.0, d=d)
        assert jump_target(l, e, e, p) == l

    @given(
        eg=st.floats(0, 0.95),
        eb=st.floats(0, 0.95),
        bump=st.floats(0.01, 0.05),
    )
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_market_expectations(self, eg, eb, bump):
        # with positive rates, more expected good effort lowers the target,
        # more expected bad effort raises it
        p = ModelParams(lam=2.0, r=1.0, d=0.1)
        base = jump_target(0.0, eg, eb, p)
        assert jump_target(0.0, min(eg + bump, 1.0), eb, p) < base
        assert jump_target(0.0, eg, min(eb + bump, 1.0), p) > base

    def test_jump_length_matches_high_precision_log(self):
        mp.mp.dps = 50
        rng = np.random.default_rng(7)
        p = ModelParams(lam=2.0, r=1.0, d=0.3)
        for _ in range(100):
            l = float(rng.uniform(-10, 10))
            eg = float(rng.uniform(0, 1))
            eb = float(rng.uniform(0, 1))
            got = jump_target(l, eg, eb, p) - l
            num = p.lam * (1 - mp.mpf(eg)) + mp.mpf(p.d_good)
            den = p.lam * (1 - mp.mpf(eb)) + mp.mpf(p.d_bad)
            expect = float(mp.log(num / den))
            # the float pipeline rounds num, den and the ratio: ~3 ulp slack
            assert got == pytest.approx(expect, abs=2e-15)


class TestDrift:
    def test_watch_region_drift(self):
        p = ModelParams(lam=2.0, r=1.0, d=0.0)
        assert drift(1.0, 0.0, p) == 2.0

    def test_pooling_freezes_the_belief(self):
        p = ModelParams(lam=2.0, r=1.0, d=0.7)
        assert drift(0.4, 0.4, p) == 0.0

    def test_rate_asymmetry_contribution(self):
        p = ModelParams(lam=2.0, r=1.0, d=0.5, d_good=0.4, d_bad=0.6)
        assert drift(0.0, 0.0, p) == pytest.approx(0.2, abs=1e-15)


class TestCostFn:
    def test_published_linear_costs(self):
        good = CostFn(a=0.1)
        bad = CostFn(a=200.0 / 201.0)
        assert good(1.0) == pytest.approx(0.1)
        assert good.marginal(1.0) == pytest.approx(0.1)
        assert bad(0.0) == 0.0
        assert bad.marginal(0.0) == pytest.approx(200.0 / 201.0)

    def test_quadratic_evaluation(self):
        c = CostFn(a=0.1, b=0.2)
        assert c(0.5) == pytest.approx(0.1)
        assert c.marginal(0.5) == pytest.approx(0.3)

    def test_marginal_cost_is_nondecreasing(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            c = CostFn(a=float(rng.uniform(0, 2)), b=float(rng.uniform(0.01, 2)))
            es = np.linspace(0, 1, 101)
            marg = [c.marginal(float(e)) for e in es]
            assert all(m2 >= m1 for m1, m2 in zip(marg, marg[1:]))

    def test_degenerate_cost_rejected(self):
        with pytest.raises(ValueError):
            CostFn(a=0.0, b=0.0)
        with pytest.raises(ValueError):
            CostFn(a=-0.1)

    def test_domain_error_outside_unit_interval(self):
        with pytest.raises(ValueError):
            CostFn(a=1.0)(1.5)

    def test_strong_single_crossing(self):
        pair = CostPair(good=CostFn(a=0.1), bad=CostFn(a=200.0 / 201.0))
        assert pair.strong_single_crossing()
        swapped = CostPair(good=CostFn(a=200.0 / 201.0), bad=CostFn(a=0.1))
        assert not swapped.strong_single_crossing()


class TestBenefitFn:
    def test_midpoint_of_published_benefit(self):
        assert BenefitFn(k=4.2)(4.2) == pytest.approx(0.5, abs=1e-15)

    def test_endpoints_exact(self):
        b = BenefitFn(k=4.2, m=0.25, s=2.0)
        assert b(INF) == b.beta_max == 2.25
        assert b(-INF) == b.beta_min == 0.25

    def test_symmetric_logistic_at_zero(self):
        assert BenefitFn()(0.0) == 0.5

    def test_monotone_on_dense_grid(self):
        b = BenefitFn(k=1.3, m=0.2, s=1.7)
        ls = np.linspace(-12, 12, 10_000)
        vals = np.array([b(float(l)) for l in ls])
        assert np.all(np.diff(vals) > 0)

    def test_family_tag(self):
        assert BenefitFn(k=4.2).family == "shifted-logistic"
        assert BenefitFn(k=4.2, m=0.1).family == "affine-logistic"

    def test_nonincreasing_scale_rejected(self):
        with pytest.raises(ValueError):
            BenefitFn(s=0.0)


class TestBeliefLogOddsDuality:
    def test_round_trip(self):
        rng = np.random.default_rng(11)
        for mu in rng.uniform(1e-6, 1 - 1e-6, size=200):
            assert belief_from_log_odds(log_odds_from_belief(float(mu))) == pytest.approx(
                float(mu), abs=1e-12
            )

    def test_endpoints(self):
        assert log_odds_from_belief(0.0) == -INF
        assert log_odds_from_belief(1.0) == INF
        assert belief_from_log_odds(INF) == 1.0
        assert belief_from_log_odds(-INF) == 0.0

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            log_odds_from_belief(1.5)


class TestModelParams:
    def test_symmetric_benchmark_flag(self):
        assert ModelParams(lam=1.0, r=0.1, d=0.2).symmetric
        assert not ModelParams(lam=1.0, r=0.1, d=0.2, d_good=0.1, d_bad=0.3).symmetric

    def test_invalid_rates_rejected(self):
        with pytest.raises(ValueError):
            ModelParams(lam=0.0, r=0.1)
        with pytest.raises(ValueError):
            ModelParams(lam=1.0, r=0.0)
        with pytest.raises(ValueError):
            ModelParams(lam=1.0, r=0.1, d=-0.2)

    def test_majorant_rate(self):
        p = ModelParams(lam=2.0, r=0.1, d=0.1, d_good=0.05, d_bad=0.3)
        assert p.majorant_rate == pytest.approx(2.3)
