import numpy as np
import pytest

from masscurve import (Perturbation, RadialProblem, ValidationError, Weight,
                       curve_extrema, first_dirichlet_eigenvalue, mass_lookup,
                       trace_mass_curve)
from masscurve.continuation import worker_count


@pytest.fixture(scope="module")
def small_sc_curve():
    """Cheap supercritical curve for structural tests (full-range curves are
    session fixtures used by the acceptance suite)."""
    prob = RadialProblem(3, 4.0, 1.0)
    lam1 = first_dirichlet_eigenvalue(3, 1.0)
    return prob, trace_mass_curve(prob, -lam1 + 1e-3, 30.0, budget=16)


class TestTrace:
    def test_samples_ordered_and_positive(self, small_sc_curve):
        _, curve = small_sc_curve
        assert np.all(np.diff(curve.lambdas) > 0)
        assert np.all(curve.masses > 0)

    def test_refinement_spent_on_worst_jumps(self, small_sc_curve):
        # refinement either brings all (geometrically loose) jumps under the
        # 5% continuity budget or exhausts the extra sample budget; near the
        # eigenvalue (mass -> 0) the latter is the expected outcome
        _, curve = small_sc_curve
        lam1 = first_dirichlet_eigenvalue(3, 1.0)
        ratios = (curve.lambdas[1:] + lam1) / (curve.lambdas[:-1] + lam1)
        loose = ratios > 1.02
        under_budget = np.all(curve.jumps()[loose] <= 0.05)
        assert under_budget or len(curve.refinement_log) == 16
        assert all(entry["status"] == "refined" for entry in curve.refinement_log)

    def test_samples_have_low_residual(self, small_sc_curve):
        _, curve = small_sc_curve
        assert max(s.relative_residual for s in curve.samples) < 1e-8

    def test_bad_inputs(self):
        prob = RadialProblem(3, 4.0, 1.0)
        with pytest.raises(ValidationError):
            trace_mass_curve(prob, 0.0, 10.0, budget=8)   # budget too small
        with pytest.raises(ValidationError):
            trace_mass_curve(prob, -100.0, 10.0)          # below -lambda_1
        with pytest.raises(ValidationError):
            trace_mass_curve(prob, 10.0, 5.0)             # inverted range


class TestExtrema:
    def test_interior_max_refined(self, small_sc_curve):
        _, curve = small_sc_curve
        ext = curve_extrema(curve)
        assert ext.interior and ext.refined
        assert ext.b >= float(np.max(curve.masses))
        assert curve.lambdas[0] < ext.lam_star < curve.lambdas[-1]
        assert ext.trend_at_lam_max < 0   # decaying supercritical tail

    def test_monotone_curve_boundary_supremum(self):
        # subcritical mass grows toward lam_max: supremum at the boundary
        prob = RadialProblem(3, 3.0, 1.0)
        lam1 = first_dirichlet_eigenvalue(3, 1.0)
        curve = trace_mass_curve(prob, -lam1 + 0.5, 50.0, budget=16)
        ext = curve_extrema(curve)
        assert not ext.interior
        assert ext.lam_star == pytest.approx(curve.lambdas[-1])
        assert ext.trend_at_lam_max > 0


class TestLookup:
    def test_two_roots_below_max(self, small_sc_curve):
        prob, curve = small_sc_curve
        ext = curve_extrema(curve)
        result = mass_lookup(prob, curve, ext.b / 2.0)
        assert len(result) == 2
        (lam1, gs1), (lam2, gs2) = list(result)
        assert lam1 < ext.lam_star < lam2
        for gs in (gs1, gs2):
            assert abs(gs.mass - ext.b / 2.0) <= 1e-8 * ext.b / 2.0
            assert gs.relative_residual < 1e-8

    def test_no_roots_above_max(self, small_sc_curve):
        prob, curve = small_sc_curve
        ext = curve_extrema(curve)
        assert len(mass_lookup(prob, curve, 1.5 * ext.b)) == 0

    def test_single_root_subcritical(self):
        prob = RadialProblem(3, 3.0, 1.0)
        lam1 = first_dirichlet_eigenvalue(3, 1.0)
        curve = trace_mass_curve(prob, -lam1 + 0.5, 50.0, budget=16)
        c = float(np.median(curve.masses))
        result = mass_lookup(prob, curve, c)
        assert len(result) == 1

    def test_invalid_mass(self, small_sc_curve):
        prob, curve = small_sc_curve
        with pytest.raises(ValidationError):
            mass_lookup(prob, curve, -1.0)


class TestWorkers:
    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("NLS_MASSCURVE_THREADS", "3")
        assert worker_count() == 3

    def test_env_invalid(self, monkeypatch):
        monkeypatch.setenv("NLS_MASSCURVE_THREADS", "many")
        with pytest.raises(ValidationError):
            worker_count()

    def test_default_positive(self, monkeypatch):
        monkeypatch.delenv("NLS_MASSCURVE_THREADS", raising=False)
        assert worker_count() >= 1
