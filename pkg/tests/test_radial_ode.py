import math

import numpy as np
import pytest

from masscurve import (EventKind, IntegratorSettings, RadialProblem,
                       RadialProfile, ValidationError, h1_distance, integrate,
                       unit_sphere_area)
from masscurve.radial_ode import profile_to_csv, resample


class TestUnitSphereArea:
    def test_known_dimensions(self):
        assert unit_sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-15)
        assert unit_sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-15)
        assert unit_sphere_area(4) == pytest.approx(2 * math.pi**2, rel=1e-14)


class TestIntegrate:
    def test_near_linear_crossing_at_bessel_zero(self):
        # at tiny height the cubic term is negligible and u is proportional
        # to sin(pi r)/(pi r) in dimension 3, so lam = -pi^2 puts the first
        # zero at r = 1 up to O(a^2)
        prob = RadialProblem(3, 4.0, 2.0)
        profile = integrate(prob, -math.pi**2, 1e-6, 2.0)
        assert profile.terminal_event.kind is EventKind.ZERO_CROSSING
        assert profile.terminal_event.radius == pytest.approx(1.0, abs=1e-8)

    def test_reaches_end_when_no_crossing(self):
        prob = RadialProblem(3, 3.0, 1.0)
        profile = integrate(prob, 0.0, 1e-3, 0.5)
        assert profile.terminal_event.kind is EventKind.REACHED_END
        assert profile.r_end == pytest.approx(0.5)
        assert np.all(profile.u > 0)

    def test_large_height_crosses(self):
        prob = RadialProblem(3, 3.0, 1.0)
        profile = integrate(prob, 0.0, 100.0, 1.0)
        assert profile.terminal_event.kind is EventKind.ZERO_CROSSING

    def test_origin_values(self):
        prob = RadialProblem(3, 3.0, 1.0)
        a = 2.0
        profile = integrate(prob, 1.0, a, 0.5)
        assert profile.grid[0] == 0.0
        assert profile.u[0] == pytest.approx(a, rel=1e-14)
        assert profile.du[0] == 0.0

    def test_tolerance_refinement_consistency(self):
        # halving tolerances changes the profile far less than the coarse
        # tolerance itself (adaptive-order sanity)
        prob = RadialProblem(3, 3.0, 1.0)
        coarse = integrate(prob, 0.0, 5.0, 0.9,
                           IntegratorSettings(rtol=1e-7, atol=1e-10))
        fine = integrate(prob, 0.0, 5.0, 0.9)
        diff = abs(coarse.spline()(0.7) - fine.spline()(0.7))
        assert diff < 1e-7 * 5.0

    def test_invalid_inputs(self):
        prob = RadialProblem(3, 3.0, 1.0)
        with pytest.raises(ValidationError):
            integrate(prob, 0.0, -1.0, 1.0)
        with pytest.raises(ValidationError):
            integrate(prob, 0.0, 1.0, -2.0)

    def test_zero_height_gives_zero_profile(self):
        prob = RadialProblem(3, 3.0, 1.0)
        profile = integrate(prob, 0.0, 0.0, 1.0)
        assert np.all(profile.u == 0)


class TestH1Distance:
    def _profile(self, n=501, scale=1.0, r_end=1.0):
        g = np.linspace(0.0, r_end, n)
        u = scale * np.cos(0.5 * math.pi * g / r_end)
        du = -scale * 0.5 * math.pi / r_end * np.sin(0.5 * math.pi * g / r_end)
        from masscurve.radial_ode import TerminalEvent
        return RadialProfile(g, u, du, TerminalEvent(EventKind.REACHED_END), 3)

    def test_self_distance_zero(self):
        p = self._profile()
        assert h1_distance(p, p) == 0.0

    def test_scaling_linearity(self):
        p1 = self._profile(scale=1.0)
        p2 = self._profile(scale=3.0)
        p0 = self._profile(scale=0.0)
        d12 = h1_distance(p1, p2)
        d01 = h1_distance(p0, p1)
        assert d12 == pytest.approx(2.0 * d01, rel=1e-10)

    def test_zero_extension(self):
        # same C^1 bump, one copy carried on a longer grid padded with zeros:
        # distance must vanish up to interpolation error
        from masscurve.radial_ode import TerminalEvent

        def bump(g):
            x = np.clip(g, 0.0, 1.0)
            u = (1.0 - x * x) ** 2
            du = -4.0 * x * (1.0 - x * x)
            return np.where(g <= 1.0, u, 0.0), np.where(g <= 1.0, du, 0.0)

        g1 = np.linspace(0.0, 1.0, 501)
        g2 = np.linspace(0.0, 2.0, 1001)
        short = RadialProfile(g1, *bump(g1), TerminalEvent(EventKind.REACHED_END), 3)
        longp = RadialProfile(g2, *bump(g2), TerminalEvent(EventKind.REACHED_END), 3)
        # limited by cubic-spline ringing at the (C^1 only) junction r = 1
        assert h1_distance(short, longp) < 1e-3

    def test_dimension_mismatch(self):
        from masscurve.radial_ode import TerminalEvent
        g = np.linspace(0.0, 1.0, 5)
        p2 = RadialProfile(g, g * 0, g * 0, TerminalEvent(EventKind.REACHED_END), 2)
        p3 = RadialProfile(g, g * 0, g * 0, TerminalEvent(EventKind.REACHED_END), 3)
        with pytest.raises(ValidationError):
            h1_distance(p2, p3)


class TestProfilePlumbing:
    def test_resample(self):
        prob = RadialProblem(3, 3.0, 1.0)
        profile = integrate(prob, 0.0, 5.0, 0.8)
        new = resample(profile, np.linspace(0.0, 0.5, 101))
        assert new.grid.size == 101
        assert new.u[0] == pytest.approx(profile.u[0], rel=1e-12)

    def test_csv_roundtrip(self, tmp_path):
        prob = RadialProblem(3, 3.0, 1.0)
        profile = integrate(prob, 2.0, 5.0, 0.8)
        path = tmp_path / "profile.csv"
        profile_to_csv(profile, path, lam=2.0, a=5.0)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# N=3 lambda=2 a=5")
        assert lines[1] == "r,u,du"
        data = np.loadtxt(lines[2:], delimiter=",")
        assert np.allclose(data[:, 0], profile.grid)
        assert np.allclose(data[:, 1], profile.u)

    def test_profile_validation(self):
        from masscurve.radial_ode import TerminalEvent
        g = np.linspace(0.1, 1.0, 5)  # does not start at 0
        with pytest.raises(ValidationError):
            RadialProfile(g, g * 0, g * 0, TerminalEvent(EventKind.REACHED_END), 3)
