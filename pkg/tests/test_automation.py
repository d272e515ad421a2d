"""Automation function family, runtime requirements, and belief updates."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from gate import default_preset
from gate.automation import (AutomationFunction, BeliefState,
                             InfeasibleTaskError, TaskGrid,
                             capability_with_inference, digital_workers,
                             fraction_automatable, inverse_automation,
                             midpoint_nodes, runtime_requirement,
                             update_beliefs)


def default_af(zeta=1.0):
    return AutomationFunction.from_params(default_preset(), zeta)


def automation_params():
    return st.tuples(
        st.floats(0.01, 0.5),          # f_init
        st.floats(30.0, 41.0),         # log10 t_agi
        st.floats(0.5, 10.0),          # delta_flop
    )


class TestFractionAutomatable:
    def test_ramp_start_gives_initial_fraction(self):
        af = default_af()
        assert fraction_automatable(af, af.t_agi / 10 ** af.delta_flop) == \
            pytest.approx(af.f_init, abs=1e-15)

    def test_full_automation_at_t_agi(self):
        af = default_af()
        assert fraction_automatable(af, af.t_agi) == pytest.approx(1.0, abs=1e-15)

    def test_log_midpoint_of_ramp(self):
        af = default_af()
        mid = math.sqrt(af.t_agi * af.t_agi / 10 ** af.delta_flop)
        expected = af.f_init + (1 - af.f_init) / 2
        assert fraction_automatable(af, mid) == pytest.approx(expected, rel=1e-12)

    def test_plateau_candidate_caps_at_zeta(self):
        af = default_af(zeta=0.6)
        assert fraction_automatable(af, af.t_agi) == 0.6
        assert fraction_automatable(af, 10 * af.t_agi) == 0.6

    @settings(max_examples=80, deadline=None)
    @given(automation_params(), st.floats(1e20, 1e45))
    def test_non_decreasing_in_capability(self, params, cap):
        f_init, log_t, d_flop = params
        af = AutomationFunction(f_init, 10 ** log_t, d_flop)
        lo = fraction_automatable(af, cap)
        hi = fraction_automatable(af, cap * 1.7)
        assert hi >= lo
        assert f_init <= lo <= 1.0


class TestInverse:
    def test_below_initial_fraction_costs_nothing(self):
        af = default_af()
        assert inverse_automation(af, af.f_init / 2) == 0.0
        assert inverse_automation(af, af.f_init) == 0.0

    def test_full_automation_costs_t_agi(self):
        af = default_af()
        assert inverse_automation(af, 1.0) == pytest.approx(af.t_agi, rel=1e-12)

    def test_beyond_plateau_is_infinite(self):
        af = default_af(zeta=0.6)
        assert inverse_automation(af, 0.7) == math.inf

    @settings(max_examples=80, deadline=None)
    @given(automation_params(), st.floats(0.0, 1.0))
    def test_round_trip_identity_on_ramp(self, params, u):
        f_init, log_t, d_flop = params
        af = AutomationFunction(f_init, 10 ** log_t, d_flop)
        i = f_init + (1 - f_init) * max(u, 1e-12)
        cap = inverse_automation(af, i)
        assert fraction_automatable(af, cap) == pytest.approx(i, abs=1e-9)


class TestCapability:
    def test_documented_example(self):
        # 1e30 training, 100x inference at slope 2 -> one extra OOM
        assert capability_with_inference(1e30, 100, 2) == pytest.approx(1e31, rel=1e-12)

    def test_unit_multiplier_is_identity(self):
        assert capability_with_inference(3.7e28, 1.0, 2.5) == 3.7e28

    def test_direct_evaluation(self):
        assert capability_with_inference(1e30, 10 ** 6, 3) == pytest.approx(1e32, rel=1e-12)


class TestRuntimeRequirement:
    def test_minimum_cost_below_training_threshold(self):
        p = default_preset()
        af = default_af()
        r = runtime_requirement(0.0, p.c_t0, af, p.gamma0, p.gamma1, p.m,
                                p.iota_max)
        assert r == pytest.approx(10 ** p.gamma0, rel=1e-12)
        assert r == pytest.approx(1e15, rel=1e-12)

    def test_inference_penalty_above_training_threshold(self):
        p = default_preset()
        af = default_af()
        # mid-ramp task trained at a tenth of its minimal requirement:
        # the multiplier is (10)^m on top of the minimum cost
        i = 0.5
        c_t = inverse_automation(af, i) / 10
        r = runtime_requirement(i, c_t, af, p.gamma0, p.gamma1, p.m, p.iota_max)
        assert r == pytest.approx(10 ** p.m * 10 ** (p.gamma0 + p.gamma1 * i),
                                  rel=1e-9)

    def test_infeasible_task_raises(self):
        p = default_preset()
        af = default_af()
        feasible = fraction_automatable(
            af, capability_with_inference(p.c_t0, p.iota_max, p.m))
        with pytest.raises(InfeasibleTaskError):
            runtime_requirement(feasible + 0.05, p.c_t0, af, p.gamma0,
                                p.gamma1, p.m, p.iota_max)

    def test_monotone_in_task_and_training(self):
        p = default_preset()
        af = default_af()
        c_t = 1e31
        feasible = fraction_automatable(
            af, capability_with_inference(c_t, p.iota_max, p.m))
        tasks = [feasible * k / 10 for k in range(1, 10)]
        reqs = [runtime_requirement(i, c_t, af, p.gamma0, p.gamma1, p.m,
                                    p.iota_max) for i in tasks]
        assert all(a <= b for a, b in zip(reqs, reqs[1:]))
        bigger = [runtime_requirement(i, 10 * c_t, af, p.gamma0, p.gamma1,
                                      p.m, p.iota_max) for i in tasks]
        assert all(b <= r for b, r in zip(bigger, reqs))

    def test_multiplier_never_exceeds_iota_max(self):
        p = default_preset()
        af = default_af()
        c_t = 1e30
        feasible = fraction_automatable(
            af, capability_with_inference(c_t, p.iota_max, p.m))
        for frac in (0.2, 0.6, 0.95, 1.0):
            i = frac * feasible
            r = runtime_requirement(i, c_t, af, p.gamma0, p.gamma1, p.m,
                                    p.iota_max)
            multiplier = r / 10 ** (p.gamma0 + p.gamma1 * i)
            assert multiplier <= p.iota_max * (1 + 1e-9)


class TestDigitalWorkers:
    def test_zero_compute_zero_workers(self):
        assert digital_workers(0.0, 1e15) == 0.0

    def test_division(self):
        assert digital_workers(1e28, 1e15) == pytest.approx(1e13)

    def test_linear_in_compute(self):
        assert digital_workers(2e20, 3e10) == pytest.approx(2 * digital_workers(1e20, 3e10))


class TestBeliefs:
    def make_beliefs(self):
        p = default_preset()
        cands = tuple(AutomationFunction.from_params(p, z)
                      for z in (0.3, 0.6, 1.0))
        return BeliefState(cands, (0.2, 0.3, 0.5), (True, True, True))

    def test_no_news_below_every_plateau(self):
        b = self.make_beliefs()
        cap = b.candidates[0].plateau_onset() * 0.5
        f_obs = fraction_automatable(b.candidates[2], cap)
        after = update_beliefs(b, cap, f_obs)
        assert after.probs == b.probs
        assert after.surviving == (True, True, True)

    def test_renormalization_after_first_plateau_is_passed(self):
        b = self.make_beliefs()
        cap = b.candidates[0].plateau_onset() * 1.5
        cap = min(cap, b.candidates[1].plateau_onset() * 0.99)
        f_obs = fraction_automatable(b.candidates[2], cap)
        after = update_beliefs(b, cap, f_obs)
        assert after.surviving == (False, True, True)
        assert after.probs == pytest.approx((0.0, 0.375, 0.625))

    def test_full_automation_leaves_single_survivor(self):
        b = self.make_beliefs()
        cap = b.candidates[2].t_agi * 2
        f_obs = fraction_automatable(b.candidates[2], cap)
        after = update_beliefs(b, cap, f_obs)
        assert after.surviving == (False, False, True)
        assert after.probs == (0.0, 0.0, 1.0)

    def test_plateaued_truth_eliminates_more_ambitious_candidates(self):
        # scenario where the middle candidate is the realized function
        b = self.make_beliefs()
        cap = b.candidates[1].plateau_onset() * 1.5
        f_obs = fraction_automatable(b.candidates[1], cap)
        after = update_beliefs(b, cap, f_obs)
        assert after.surviving == (False, True, False)
        assert after.probs == (0.0, 1.0, 0.0)

    def test_probabilities_always_sum_to_one(self):
        b = self.make_beliefs()
        truth = b.candidates[2]
        cap = truth.ramp_onset()
        for _ in range(6):
            cap *= 3.0
            b = update_beliefs(b, cap, fraction_automatable(truth, cap))
            assert sum(b.probs) == pytest.approx(1.0, abs=1e-12)

    def test_inconsistent_observation_raises(self):
        b = self.make_beliefs()
        with pytest.raises(ValueError):
            update_beliefs(b, b.candidates[0].ramp_onset() / 2, 0.77)


class TestTaskGrid:
    def test_grid_shapes_and_weights(self):
        grid = TaskGrid.from_params(default_preset())
        assert len(grid.worker_nodes) == 20
        assert len(grid.labor_nodes) == 100
        assert sum(grid.worker_weights()) == pytest.approx(1.0)
        assert sum(grid.labor_weights()) == pytest.approx(1.0)

    def test_nodes_sorted_and_interior(self):
        nodes = midpoint_nodes(20)
        assert list(nodes) == sorted(nodes)
        assert nodes[0] == pytest.approx(0.025)
        assert 0 < nodes[0] and nodes[-1] < 1
