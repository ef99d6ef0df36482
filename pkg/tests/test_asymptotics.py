import math

import numpy as np
import pytest

from masscurve import (DomainError, RadialProblem, ValidationError, Weight,
                       shoot_ground_state, solve_whole_space_Q)
from masscurve.asymptotics import (compare_to_Q, equation_residual,
                                   mass_scaling_exponent,
                                   renormalized_q_mass, rescale,
                                   rescaled_energy, verify_limits)


class TestRescale:
    def test_mass_identity_machine_exact(self):
        prob = RadialProblem(3, 4.0, 1.0)
        for lam in (2.0, 20.0, 200.0):
            rs = rescale(shoot_ground_state(prob, lam))
            assert rs.mass_identity_defect() < 1e-12

    def test_grid_stretch(self):
        prob = RadialProblem(3, 4.0, 1.0)
        gs = shoot_ground_state(prob, 25.0)
        rs = rescale(gs)
        assert rs.profile.r_end == pytest.approx(5.0 * gs.profile.r_end, rel=1e-14)
        assert rs.mu == pytest.approx(0.04)

    def test_rejects_small_multiplier(self):
        prob = RadialProblem(3, 4.0, 1.0)
        gs = shoot_ground_state(prob, 0.5)
        with pytest.raises(DomainError):
            rescale(gs)

    def test_equation_residual_small(self):
        prob = RadialProblem(3, 4.0, 1.0)
        rs = rescale(shoot_ground_state(prob, 100.0))
        assert equation_residual(rs) < 1e-10

    def test_rescaled_energy_finite(self):
        prob = RadialProblem(3, 4.0, 1.0)
        rs = rescale(shoot_ground_state(prob, 50.0))
        assert math.isfinite(rescaled_energy(rs))

    def test_scaling_exponent_signs(self):
        assert mass_scaling_exponent(3, 4.0) == pytest.approx(-0.5)
        assert mass_scaling_exponent(3, 3.0) == pytest.approx(0.5)
        assert mass_scaling_exponent(2, 4.0) == 0.0


class TestCompareToQ:
    def test_distance_shrinks_with_lambda(self, q_3_4):
        prob = RadialProblem(3, 4.0, 1.0)
        d_small = compare_to_Q(rescale(shoot_ground_state(prob, 10.0)), q_3_4)
        d_large = compare_to_Q(rescale(shoot_ground_state(prob, 100.0)), q_3_4)
        assert d_large < d_small / 10.0

    def test_weighted_problem_renormalizes_by_d0(self, q_3_4):
        # constant weight 4 with p = 4: u = (1/2) u_unweighted solves it, so
        # the d0-renormalized comparison must still converge to Q
        prob = RadialProblem(3, 4.0, 1.0, Weight.constant(4.0))
        d = compare_to_Q(rescale(shoot_ground_state(prob, 100.0)), q_3_4)
        assert d < 1e-2
        assert renormalized_q_mass(q_3_4, 4.0) == pytest.approx(
            q_3_4.mass / 4.0, rel=1e-14)

    def test_mismatch_rejected(self, q_2_4):
        prob = RadialProblem(3, 4.0, 1.0)
        rs = rescale(shoot_ground_state(prob, 10.0))
        with pytest.raises(ValidationError):
            compare_to_Q(rs, q_2_4)


class TestVerifyLimits:
    def test_supercritical_report(self, sc_problem, sc_curve, q_3_4):
        rep = verify_limits(sc_problem, sc_curve, q_3_4)
        assert rep["tail_slope"].verdict == "pass"
        assert rep["tail_intercept"].verdict == "pass"
        assert rep.metadata["slope_fit"] == pytest.approx(-0.5, rel=0.05)

    def test_subcritical_report(self, sub_problem, sub_curve, q_3_3):
        rep = verify_limits(sub_problem, sub_curve, q_3_3)
        assert rep["tail_slope"].verdict == "pass"
        assert rep.metadata["slope_fit"] == pytest.approx(0.5, rel=0.05)

    def test_critical_report(self, crit_problem, crit_curve, q_2_4):
        rep = verify_limits(crit_problem, crit_curve, q_2_4)
        assert rep["critical_mass_limit"].verdict == "pass"

    def test_short_curve_rejected(self):
        from masscurve import first_dirichlet_eigenvalue, trace_mass_curve
        prob = RadialProblem(3, 4.0, 1.0)
        lam1 = first_dirichlet_eigenvalue(3, 1.0)
        curve = trace_mass_curve(prob, -lam1 + 0.5, 0.9, budget=16)
        q = solve_whole_space_Q(3, 4.0)
        with pytest.raises(ValidationError):
            verify_limits(prob, curve, q)
