"""Orbital stability along the branch via the slope criterion.

With m(lam) the unsquared L^2 norm of the ground state, the standing wave
e^(i lam t) u_lam is orbitally stable where m'(lam) > 0 and unstable where
m'(lam) < 0, provided the linearized operator

    L = -u'' - (N-1)/r u' + lam u - f_u(r, u_lam(r)) u

has no zero eigenvalue (nondegeneracy).  The slope is a centered finite
difference on fresh solves with a Richardson error estimate; the verdict is
inconclusive inside a band of three times that estimate.  Only radial
perturbations enter the linearization; non-radial modes are out of scope and
flagged in every record.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .continuation import MassCurve, mass_lookup, worker_count
from .errors import NumericError, ValidationError
from .fdgrid import RadialGrid, symmetric_tridiagonal
from .groundstate import GroundState, SolverSettings, shoot_ground_state
from .problem import RadialProblem

STABLE = "stable"
UNSTABLE = "unstable"
INCONCLUSIVE = "inconclusive"

#: verdicts flag nondegeneracy gaps below this instead of silently classifying
GAP_TOL = 1e-3


@dataclass(frozen=True)
class StabilityVerdict:
    lam: float
    mass: float                 # unsquared L^2 norm
    slope: float                # dm/dlam
    slope_err: float            # Richardson truncation estimate
    verdict: str
    nondeg_gap: float
    flags: tuple = ()

    def to_scalars(self) -> dict:
        return {"lambda": self.lam, "mass": self.mass, "slope": self.slope,
                "slope_err": self.slope_err, "verdict": self.verdict,
                "nondeg_gap": self.nondeg_gap, "flags": list(self.flags)}


def _unsquared(problem, curve, lam, settings) -> float:
    gs = shoot_ground_state(problem, lam, settings,
                            warm_start=curve.nearest_height(lam))
    return math.sqrt(gs.mass)


def mass_slope(problem: RadialProblem, curve: MassCurve, lam: float,
               settings: SolverSettings = SolverSettings()):
    """Centered-difference slope of the unsquared mass at an interior lam.

    Returns (slope, error): the Richardson-extrapolated derivative from steps
    h and h/2 and the resulting truncation estimate |D(h/2) - D(h)| / 3.
    """
    lams = curve.lambdas
    if not (lams[0] < lam < lams[-1]):
        raise ValidationError(
            f"lam={lam} is not interior to the traced range "
            f"[{lams[0]}, {lams[-1]}]")
    i = int(np.searchsorted(lams, lam))
    local = float(lams[min(i, len(lams) - 1)] - lams[max(i - 1, 0)])
    h = max(1e-3 * (1.0 + abs(lam)), local)
    # keep the stencil inside the traced range
    h = min(h, 0.5 * (lam - lams[0]), 0.5 * (lams[-1] - lam))

    def diff(step):
        mp = _unsquared(problem, curve, lam + step, settings)
        mm = _unsquared(problem, curve, lam - step, settings)
        return (mp - mm) / (2.0 * step)

    d_full, d_half = diff(h), diff(0.5 * h)
    slope = (4.0 * d_half - d_full) / 3.0
    err = abs(d_half - d_full) / 3.0
    return slope, err


def linearized_spectrum(gs: GroundState, k: int, n: int = 4000):
    """k smallest eigenvalues of the radial linearization at a ground state.

    Second-order flux-form differences on a uniform grid, symmetrized under
    the weight r^(N-1), solved by bisection plus inverse iteration on the
    tridiagonal form.
    """
    if k < 1:
        raise ValidationError("k must be at least 1")
    problem = gs.problem
    grid = RadialGrid(problem.dimension, problem.radius, n)
    u = gs.profile.spline()(grid.nodes)
    V = gs.lam - problem.f_u(grid.nodes, u)
    diag, off = symmetric_tridiagonal(grid, V)
    try:
        vals = eigh_tridiagonal(diag, off, select="i",
                                select_range=(0, k - 1), eigvals_only=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericError(f"eigenvalue solve failed: {exc}")
    return [float(v) for v in vals]


def nondegeneracy_gap(gs: GroundState, k: int = 3, n: int = 4000) -> float:
    return min(abs(v) for v in linearized_spectrum(gs, k, n))


def _verdict_at(problem, curve, lam, gs, settings) -> StabilityVerdict:
    slope, err = mass_slope(problem, curve, lam, settings)
    band = 3.0 * err
    if slope > band:
        verdict = STABLE
    elif slope < -band:
        verdict = UNSTABLE
    else:
        verdict = INCONCLUSIVE
    gap = nondegeneracy_gap(gs)
    flags = ["radial_linearization_only"]
    if gap < GAP_TOL:
        flags.append("nondegeneracy_gap_below_tolerance")
    return StabilityVerdict(lam, math.sqrt(gs.mass), slope, err, verdict,
                            gap, tuple(flags))


def classify_at_mass(problem: RadialProblem, curve: MassCurve, c: float,
                     settings: SolverSettings = SolverSettings()):
    """Stability verdicts at every multiplier whose ground state has mass c.

    Returns verdicts sorted by lam; an empty list means no normalized
    solution at this mass within the traced range.  The expected supercritical
    two-root pattern is (stable, unstable); deviations are reported as-is.
    """
    roots = mass_lookup(problem, curve, c, settings)
    jobs = [(lam, gs) for lam, gs in roots]
    if not jobs:
        return []
    workers = min(worker_count(), len(jobs))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(
                lambda j: _verdict_at(problem, curve, j[0], j[1], settings), jobs))
    else:
        verdicts = [_verdict_at(problem, curve, lam, gs, settings)
                    for lam, gs in jobs]
    verdicts.sort(key=lambda v: v.lam)
    return verdicts
