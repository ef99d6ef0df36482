import math

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from masscurve import (RadialProblem, ValidationError, curve_extrema,
                       first_dirichlet_eigenvalue, linearized_spectrum,
                       mass_slope, nondegeneracy_gap, shoot_ground_state,
                       trace_mass_curve)
from masscurve.fdgrid import RadialGrid, symmetric_tridiagonal
from masscurve.stability import classify_at_mass


@pytest.fixture(scope="module")
def sc_setup():
    prob = RadialProblem(3, 4.0, 1.0)
    lam1 = first_dirichlet_eigenvalue(3, 1.0)
    curve = trace_mass_curve(prob, -lam1 + 1e-3, 30.0, budget=16)
    return prob, curve, curve_extrema(curve)


class TestMassSlope:
    def test_signs_around_argmax(self, sc_setup):
        prob, curve, ext = sc_setup
        s_left, e_left = mass_slope(prob, curve, ext.lam_star - 5.0)
        s_right, e_right = mass_slope(prob, curve, ext.lam_star + 10.0)
        assert s_left > 3.0 * e_left
        assert s_right < -3.0 * e_right

    def test_inconclusive_at_argmax(self, sc_setup):
        prob, curve, ext = sc_setup
        slope, err = mass_slope(prob, curve, ext.lam_star)
        assert abs(slope) <= 3.0 * err

    def test_matches_squared_curve_sign(self, sc_setup):
        # d/dlam of the unsquared mass has the sign of the squared-mass
        # differences (m > 0)
        prob, curve, ext = sc_setup
        lam = ext.lam_star + 10.0
        slope, _ = mass_slope(prob, curve, lam)
        i = int(np.searchsorted(curve.lambdas, lam))
        local_sign = np.sign(curve.masses[i + 1] - curve.masses[i - 1])
        assert np.sign(slope) == local_sign

    def test_interior_only(self, sc_setup):
        prob, curve, _ = sc_setup
        with pytest.raises(ValidationError):
            mass_slope(prob, curve, curve.lambdas[-1] + 1.0)


class TestLinearizedSpectrum:
    def test_linear_case_recovers_dirichlet_eigenvalues(self):
        # V = 0: the operator is -Laplacian on the unit ball; radial
        # eigenvalues are (k pi)^2 in dimension 3
        grid = RadialGrid(3, 1.0, 4000)
        diag, off = symmetric_tridiagonal(grid, np.zeros(grid.n))
        vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, 2),
                                eigvals_only=True)
        for k, v in enumerate(vals, start=1):
            assert v == pytest.approx((k * math.pi) ** 2, rel=1e-5)

    def test_ground_state_morse_index_one(self, sc_setup):
        prob, _, _ = sc_setup
        gs = shoot_ground_state(prob, 5.0)
        vals = linearized_spectrum(gs, 3)
        assert vals[0] < 0 < vals[1] < vals[2]

    def test_resolution_convergence(self, sc_setup):
        prob, _, _ = sc_setup
        gs = shoot_ground_state(prob, 5.0)
        v1 = linearized_spectrum(gs, 2, n=2000)
        v2 = linearized_spectrum(gs, 2, n=4000)
        for a, b in zip(v1, v2):
            assert a == pytest.approx(b, rel=1e-3, abs=1e-3)

    def test_gap_positive(self, sc_setup):
        prob, _, _ = sc_setup
        gs = shoot_ground_state(prob, 0.0)
        assert nondegeneracy_gap(gs) > 1e-3

    def test_k_validation(self, sc_setup):
        prob, _, _ = sc_setup
        gs = shoot_ground_state(prob, 0.0)
        with pytest.raises(ValidationError):
            linearized_spectrum(gs, 0)


class TestClassifyAtMass:
    def test_supercritical_pattern(self, sc_setup):
        prob, curve, ext = sc_setup
        verdicts = classify_at_mass(prob, curve, ext.b / 2.0)
        assert [v.verdict for v in verdicts] == ["stable", "unstable"]
        assert verdicts[0].lam < ext.lam_star < verdicts[1].lam
        for v in verdicts:
            assert v.mass == pytest.approx(math.sqrt(ext.b / 2.0), rel=1e-8)
            assert "radial_linearization_only" in v.flags
            assert v.nondeg_gap > 1e-3

    def test_empty_above_max(self, sc_setup):
        prob, curve, ext = sc_setup
        assert classify_at_mass(prob, curve, 2.0 * ext.b) == []

    def test_subcritical_all_stable(self):
        prob = RadialProblem(3, 3.0, 1.0)
        lam1 = first_dirichlet_eigenvalue(3, 1.0)
        curve = trace_mass_curve(prob, -lam1 + 0.5, 50.0, budget=16)
        c = float(np.median(curve.masses))
        verdicts = classify_at_mass(prob, curve, c)
        assert len(verdicts) == 1
        assert verdicts[0].verdict == "stable"
