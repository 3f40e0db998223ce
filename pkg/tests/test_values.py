"""Continuation values: closed forms, the switched-region solver, diagnostics."""

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
    jump_target,
)
from signalflow.strategy import extremal_profile, pooling_profile, switched_profile
from signalflow.values import (
    GridSpec,
    ScrutinyValues,
    build_value_table,
    hjb_residual,
    pooling_value,
    scrutiny_limit,
    scrutiny_value,
    stasis_values,
    switched_value_solve,
    value_bounds_switched,
)

from _oracles import rk4_scrutiny_values


class TestPoolingValue:
    def test_flat_benefit_over_discount(self):
        params = ModelParams(lam=2.0, r=0.01, d=0.0)
        benefit = BenefitFn(k=0.0, m=0.0, s=1.0)
        assert pooling_value(0.0, params, benefit) == pytest.approx(50.0)

    def test_lower_endpoint(self):
        params = ModelParams(lam=2.0, r=0.01, d=0.0)
        benefit = BenefitFn(k=4.2, m=0.3, s=1.0)
        assert pooling_value(-INF, params, benefit) == pytest.approx(30.0)

    def test_published_lower_threshold_value(self, fig3):
        # hand evaluation of the logistic at ln(2/3) divided by r
        expect = 100.0 * (2.0 / 3.0) / ((2.0 / 3.0) + math.exp(4.2))
        got = pooling_value(fig3.l_under, fig3.params, fig3.benefit)
        assert got == pytest.approx(expect, rel=1e-12)


class TestScrutinyClosedForm:
    def test_unbounded_limit_for_the_bad_type(self, fig3):
        limit = scrutiny_limit(fig3.params, fig3.benefit, fig3.costs, BAD)
        r, lam = fig3.params.r, fig3.params.lam
        expect = fig3.benefit.beta_max / (r + lam) + lam * fig3.benefit.beta_min / (r * (r + lam))
        assert limit == pytest.approx(expect, abs=1e-12)
        assert limit == pytest.approx(1.0 / 2.01, abs=1e-12)

    def test_value_matching_at_finite_cutoff(self):
        params = ModelParams(lam=2.0, r=0.5, d=0.1)
        benefit = BenefitFn(k=-1.0)
        costs = CostPair(good=CostFn(a=0.1), bad=CostFn(a=1.0))
        ev = ScrutinyValues(0.4, 2.0, params, benefit, costs)
        for tag in (GOOD, BAD):
            assert ev.value(2.0, tag) == pytest.approx(benefit(2.0) / params.r, rel=1e-12)
            assert ev.value(2.0 - 1e-9, tag) == pytest.approx(benefit(2.0) / params.r, rel=1e-6)

    @pytest.mark.parametrize("d", [0.0, 0.1])
    def test_matches_rk4_integration(self, d):
        params = ModelParams(lam=2.0, r=0.05, d=d)
        benefit = BenefitFn(k=0.5, m=0.2, s=1.3)
        costs = CostPair(good=CostFn(a=0.15), bad=CostFn(a=1.5))
        l1, l_over = -0.5, (2.5 if d > 0 else INF)
        ev = ScrutinyValues(l1, l_over, params, benefit, costs)
        for tag in (GOOD, BAD):
            zs, vs = rk4_scrutiny_values(
                l1, l_over, params.lam, params.r, params.d_good, params.d_bad,
                costs.good(1.0), benefit.k, benefit.m, benefit.s, tag, n_steps=100_000,
            )
            idx = np.linspace(0, len(zs) - 1, 200, dtype=int)
            for i in idx:
                got = ev.value(float(zs[i]), tag)
                assert got == pytest.approx(float(vs[i]), rel=1e-8)

    def test_functional_wrapper_checks_domain(self, fig3, fig3_solution):
        prof = fig3_solution.profile
        v = scrutiny_value(1.0, prof, fig3.params, fig3.benefit, fig3.costs, BAD)
        assert v == pytest.approx(fig3_solution.table.value(1.0, BAD), rel=1e-9)
        with pytest.raises(ValueError):
            scrutiny_value(0.0, prof, fig3.params, fig3.benefit, fig3.costs, BAD)

    def test_strictly_increasing_on_grid(self, fig3_solution):
        ev = fig3_solution.table.scrutiny
        zs = ev.nodes[:: max(1, len(ev.nodes) // 2000)]
        for tag in (GOOD, BAD):
            vals = np.array([ev.value(float(z), tag) for z in zs])
            # quadrature noise of ~1 ulp is allowed once the value saturates
            assert np.all(np.diff(vals) >= -1e-12 * np.abs(vals[:-1]))
            active = zs[:-1] < ev.benefit.k + 25.0
            assert np.all(np.diff(vals)[active] > 0)


class TestSwitchedSolve:
    def test_solution_shape(self, fig3, fig3_solution):
        res = fig3_solution
        assert res.ok
        assert np.all(res.effort_e > 0.0) and np.all(res.effort_e < 1.0)
        assert np.all(np.diff(res.table.switched_v_bad) < 0)  # V_B strictly decreasing
        assert np.all(np.diff(res.table.switched_v_good) > 0)  # V_G increasing
        # boundary continuity with the pooled value below
        assert res.table.boundary["v_bad_l_under"] == pytest.approx(
            fig3.benefit(fig3.l_under) / fig3.params.r, rel=1e-9
        )

    def test_efforts_clear_the_landing_bound(self, fig3, fig3_solution):
        bound = 1.0 - np.exp(fig3_solution.effort_l - fig3.l1)
        assert np.all(fig3_solution.effort_e >= bound - 1e-12)

    def test_foc_residual_after_resubstitution(self, fig3, fig3_solution):
        # plug the solved effort back into the indifference condition
        params, costs = fig3.params, fig3.costs
        table = fig3_solution.table
        worst = 0.0
        for l, e in zip(fig3_solution.effort_l[::40], fig3_solution.effort_e[::40]):
            j = jump_target(float(l), 0.0, float(e), params)
            gap = params.lam * (table.value(float(l), BAD) - table.value(j, BAD))
            worst = max(worst, abs(gap - costs.bad.marginal(float(e))))
        assert worst < 1e-8

    def test_jumps_stay_in_scrutiny(self, fig3, fig3_solution):
        for l, e in zip(fig3_solution.effort_l[::100], fig3_solution.effort_e[::100]):
            j = jump_target(float(l), 0.0, float(e), fig3.params)
            assert j >= fig3.l1 - 1e-9

    def test_degenerate_zero_length_region(self, fig3):
        res = switched_value_solve(
            fig3.l_under, fig3.l_under, fig3.l1, INF,
            fig3.params, fig3.benefit, fig3.costs,
        )
        assert res.ok
        assert res.effort_l.size == 0 and res.effort_e.size == 0
        pooled = fig3.benefit(fig3.l_under) / fig3.params.r
        assert res.boundary["v_good_l_under"] == pytest.approx(pooled, rel=1e-12)
        assert res.boundary["v_bad_l_under"] == pytest.approx(pooled, rel=1e-12)

    def test_construction_failure_names_condition(self, fig3):
        # the published top of the switched region is just out of reach
        res = switched_value_solve(
            fig3.l_under, fig3.l0_anchor, fig3.l1, INF,
            fig3.params, fig3.benefit, fig3.costs, n_steps=500,
        )
        assert not res.ok
        assert res.failure.condition == "e"
        assert res.profile is None

    def test_convex_costs_take_the_bisection_route(self):
        params = ModelParams(lam=3.0, r=0.3, d=0.05)
        benefit = BenefitFn(k=-2.0)
        costs = CostPair(good=CostFn(a=0.1), bad=CostFn(a=2.6, b=0.4))
        res = switched_value_solve(0.0, 0.1, 0.822, 3.289, params, benefit, costs, n_steps=400)
        assert res.ok
        worst = 0.0
        for l, e in zip(res.effort_l[::20], res.effort_e[::20]):
            j = jump_target(float(l), 0.0, float(e), params)
            gap = params.lam * (res.table.value(float(l), BAD) - res.table.value(j, BAD))
            worst = max(worst, abs(gap - costs.bad.marginal(float(e))))
        assert worst < 1e-8


class TestValueBounds:
    def test_limit_at_lower_threshold(self, fig3):
        v = fig3.benefit(fig3.l_under) / fig3.params.r
        lower, upper = value_bounds_switched(fig3.l_under, fig3.l_under, 0.5, fig3.params, fig3.benefit)
        assert lower == pytest.approx(v) and upper == pytest.approx(v)

    def test_ordering(self, fig3):
        rng = np.random.default_rng(2)
        for _ in range(50):
            l = fig3.l_under + float(rng.uniform(0.01, 0.7))
            eps = float(rng.uniform(0.05, 1.0))
            lower, upper = value_bounds_switched(l, fig3.l_under, eps, fig3.params, fig3.benefit)
            assert lower <= upper

    def test_constant_effort_weights(self, fig3):
        # exp((l_under - l) * (1 + r/lam) / eps) on the threshold-value term
        l, eps = fig3.l_under + 0.3, 0.6
        r, lam = fig3.params.r, fig3.params.lam
        travel = 0.3 / eps
        weight = math.exp(-(1.0 + r / lam) * travel)
        reach = math.exp(-travel)
        pooled = fig3.benefit(fig3.l_under) / r
        lower, upper = value_bounds_switched(l, fig3.l_under, eps, fig3.params, fig3.benefit)
        assert lower == pytest.approx(weight * pooled + (1 - reach) * fig3.benefit.beta_min / r, rel=1e-12)
        assert upper == pytest.approx(weight * pooled + (1 - reach) * fig3.benefit.beta_max / r, rel=1e-12)

    def test_solver_output_inside_the_sandwich(self, fig3, fig3_solution):
        table_pair = (fig3_solution.effort_l, fig3_solution.effort_e)
        for idx in range(50, len(fig3_solution.effort_l), 400):
            l = float(fig3_solution.effort_l[idx])
            lower, upper = value_bounds_switched(l, fig3.l_under, table_pair, fig3.params, fig3.benefit)
            for tag, arr in ((GOOD, fig3_solution.table.switched_v_good),
                             (BAD, fig3_solution.table.switched_v_bad)):
                assert lower - 1e-9 <= float(arr[idx]) <= upper + 1e-9

    def test_nonpositive_bound_rejected(self, fig3):
        with pytest.raises(ValueError):
            value_bounds_switched(0.0, fig3.l_under, 0.0, fig3.params, fig3.benefit)


class TestStasisValues:
    def test_symmetric_case_degenerates_to_pooled_value(self, fig3, fig3_solution):
        sv = stasis_values(fig3_solution.profile, fig3.params, fig3.benefit, fig3.costs)
        pooled = fig3.benefit(fig3.l_under) / fig3.params.r
        assert sv.w == 1.0
        assert sv.j_minus == fig3.l_under
        assert sv.v_good == pytest.approx(pooled, rel=1e-12)
        assert sv.v_bad == pytest.approx(pooled, rel=1e-12)

    def test_effective_rate_and_jump_formulas(self):
        # lam=2, split rates 0.49/0.51, right-limit effort one half
        params = ModelParams(lam=2.0, r=0.5, d=0.5, d_good=0.49, d_bad=0.51)
        benefit = BenefitFn(k=0.0)
        costs = CostPair(good=CostFn(a=0.1), bad=CostFn(a=1.0))
        table_l = np.linspace(0.0, 0.3, 11)
        table_e = np.full(11, 0.5)
        prof = switched_profile(0.0, 0.3, 0.5, 3.0, table_l, table_e)
        sv = stasis_values(prof, params, benefit, costs)
        assert sv.lam_star_bad == pytest.approx(1.51, abs=1e-12)
        assert sv.w == pytest.approx(0.98, abs=1e-12)
        assert sv.j_minus == pytest.approx(math.log(2.49 / 2.51), abs=1e-12)
        assert sv.j_plus == pytest.approx(math.log(2.49 / 1.51), abs=1e-12)

    def test_asymmetric_solver_boundary_matches_stasis_op(self, dpos):
        delta = 1e-3 * dpos.params.d
        params = ModelParams(lam=dpos.params.lam, r=dpos.params.r, d=dpos.params.d,
                             d_good=dpos.params.d - delta, d_bad=dpos.params.d + delta)
        res = switched_value_solve(dpos.l_under, dpos.l0, dpos.l1, dpos.l_over,
                                   params, dpos.benefit, dpos.costs, n_steps=400)
        assert res.ok and res.stasis is not None
        sv = stasis_values(res.profile, params, dpos.benefit, dpos.costs)
        assert sv.v_good == pytest.approx(res.stasis.v_good, rel=1e-9)
        assert sv.v_bad == pytest.approx(res.stasis.v_bad, rel=1e-9)
        assert sv.w == pytest.approx(res.stasis.w, rel=1e-9)


class TestHjbResidual:
    def test_pooling_region_exact(self):
        params = ModelParams(lam=2.0, r=0.01, d=0.0)
        benefit = BenefitFn(k=4.2)
        costs = CostPair(good=CostFn(a=0.1), bad=CostFn(a=1.0))
        table = build_value_table(pooling_profile(), params, benefit, costs)
        for tag in (GOOD, BAD):
            assert hjb_residual(table, pooling_profile(), params, benefit, costs, tag) < 1e-12

    def test_scrutiny_closed_form_consistency(self, fig3):
        prof = extremal_profile(fig3.l1, INF)
        table = build_value_table(prof, fig3.params, fig3.benefit, fig3.costs,
                                  GridSpec(scrutiny_step=1e-3))
        for tag in (GOOD, BAD):
            assert hjb_residual(table, prof, fig3.params, fig3.benefit, fig3.costs, tag) < 1e-6

    def test_corrupted_values_are_flagged(self, fig3):
        prof = extremal_profile(fig3.l1, INF)
        table = build_value_table(prof, fig3.params, fig3.benefit, fig3.costs)
        table.v_good = table.v_good + 0.1
        resid = hjb_residual(table, prof, fig3.params, fig3.benefit, fig3.costs, GOOD)
        assert resid >= fig3.params.r * 0.1 * 0.99

    def test_solved_tables_meet_tolerance(self, fig3, fig3_solution):
        tol = 1e-5 * (fig3.benefit.beta_max - fig3.benefit.beta_min) / fig3.params.r
        for tag in (GOOD, BAD):
            resid = hjb_residual(fig3_solution.table, fig3_solution.profile,
                                 fig3.params, fig3.benefit, fig3.costs, tag)
            assert resid < tol


class TestTableInvariants:
    def test_values_bounded_by_benefit_range(self, fig3, fig3_solution):
        r = fig3.params.r
        lo, hi = fig3.benefit.beta_min / r, fig3.benefit.beta_max / r
        for arr in (fig3_solution.table.v_good, fig3_solution.table.v_bad):
            assert np.all(arr >= lo - 1e-9) and np.all(arr <= hi + 1e-9)

    def test_pooling_grid_points_exact(self, fig3, fig3_solution):
        table = fig3_solution.table
        for l, vg, vb in zip(table.grid, table.v_good, table.v_bad):
            region = fig3_solution.profile.region_at(float(l))
            if region.kind.value == "pool_zero":
                expect = fig3.benefit(float(l)) / fig3.params.r
                assert vg == expect and vb == expect

    def test_bad_value_falls_over_the_jump(self, fig3, fig3_solution):
        # paying to avoid jumps is only rational if the jump hurts
        table = fig3_solution.table
        for l, e in zip(fig3_solution.effort_l[::100], fig3_solution.effort_e[::100]):
            j = jump_target(float(l), 0.0, float(e), fig3.params)
            assert table.value(j, BAD) < table.value(float(l), BAD)

    def test_closed_form_domains_cover_pooling_and_scrutiny(self, fig3_solution):
        kinds = {kind for _, _, kind in fig3_solution.table.closed_form_domains}
        assert kinds == {"pool_zero", "scrutiny"}
