"""Branch tracing: the mass curve lam -> |u_lam|_{L^2}^2, its extrema, and inversion.

The curve is sampled on a geometric grid in the shifted variable lam + lambda_1
(dense near the eigenvalue, stretched toward lam_max), refined where adjacent
masses jump by more than the continuity budget, and inverted for a prescribed
mass by bracketed root finding with fresh ground-state solves.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import NumericError, ValidationError
from .groundstate import GroundState, SolverSettings, first_dirichlet_eigenvalue, shoot_ground_state
from .problem import RadialProblem


def worker_count() -> int:
    env = os.environ.get("NLS_MASSCURVE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"NLS_MASSCURVE_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


@dataclass(frozen=True)
class CurveSample:
    lam: float
    mass: float
    height: float
    energy: float
    relative_residual: float
    tail_completed: bool


@dataclass
class MassCurve:
    """Ordered (lam, mass) samples of the ground-state branch plus refinement log."""

    problem: RadialProblem
    samples: list
    lam_range: tuple
    refinement_log: list = field(default_factory=list)
    continuity_budget: float = 0.05

    def __post_init__(self):
        lams = self.lambdas
        if np.any(np.diff(lams) <= 0):
            raise ValidationError("curve samples must be strictly increasing in lambda")
        if np.any(self.masses <= 0):
            raise ValidationError("curve masses must be positive")

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([s.lam for s in self.samples])

    @property
    def masses(self) -> np.ndarray:
        return np.array([s.mass for s in self.samples])

    @property
    def heights(self) -> np.ndarray:
        return np.array([s.height for s in self.samples])

    def nearest_height(self, lam: float) -> float:
        i = int(np.argmin(np.abs(self.lambdas - lam)))
        return self.samples[i].height

    def jumps(self) -> np.ndarray:
        m = self.masses
        return np.abs(np.diff(m)) / np.maximum(m[:-1], m[1:])


@dataclass(frozen=True)
class CurveExtrema:
    """Maximum of the traced mass curve and its boundary behavior."""

    b: float
    lam_star: float
    interior: bool                 # interior max vs supremum at the traced boundary
    mass_at_lam_min: float
    trend_at_lam_max: float        # sign of the last mass increment
    refined: bool = False


def _solve_sample(problem, lam, settings, warm=None) -> CurveSample:
    gs = shoot_ground_state(problem, lam, settings, warm_start=warm)
    return CurveSample(lam, gs.mass, gs.height, gs.energy,
                       gs.relative_residual, gs.diagnostics["tail_completed"])


def trace_mass_curve(problem: RadialProblem, lam_min: float, lam_max: float,
                     budget: int = 64,
                     settings: SolverSettings = SolverSettings()) -> MassCurve:
    """Trace the branch on (lam_min, lam_max] with an adaptive geometric grid.

    The initial grid holds ``budget`` samples; refinement may add up to the
    same number again wherever adjacent masses jump by more than 5%.  Initial
    samples are solved cold (and may run on several workers); refinement is
    sequential with warm starts.  Any solver failure aborts with the partial
    curve attached to the raised error.
    """
    if budget < 16:
        raise ValidationError("budget must be at least 16 samples")
    lam1 = first_dirichlet_eigenvalue(problem.dimension, problem.radius)
    if not (-lam1 < lam_min < lam_max):
        raise ValidationError(
            f"need -lambda_1 < lam_min < lam_max (lambda_1={lam1})")

    t = np.geomspace(lam_min + lam1, lam_max + lam1, budget)
    lams = t - lam1
    workers = min(worker_count(), budget)

    def solve_cold(lam):
        return _solve_sample(problem, lam, settings)

    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                samples = list(pool.map(solve_cold, lams))
        else:
            samples = [solve_cold(lam) for lam in lams]
    except Exception as exc:
        raise type(exc)(f"curve tracing aborted: {exc}") from exc

    samples.sort(key=lambda s: s.lam)
    log = []
    extra_budget = budget
    min_ratio = 1.02  # do not subdivide intervals already this tight (geometrically)
    while extra_budget > 0:
        m = np.array([s.mass for s in samples])
        lam_arr = np.array([s.lam for s in samples])
        jumps = np.abs(np.diff(m)) / np.maximum(m[:-1], m[1:])
        ratios = (lam_arr[1:] + lam1) / (lam_arr[:-1] + lam1)
        candidates = np.nonzero((jumps > 0.05) & (ratios > min_ratio))[0]
        if candidates.size == 0:
            break
        i = int(candidates[np.argmax(jumps[candidates])])
        lam_new = math.sqrt((lam_arr[i] + lam1) * (lam_arr[i + 1] + lam1)) - lam1
        warm = samples[i].height
        try:
            s_new = _solve_sample(problem, lam_new, settings, warm=warm)
        except Exception as exc:
            log.append({"interval": (lam_arr[i], lam_arr[i + 1]),
                        "jump": float(jumps[i]), "status": f"failed: {exc}"})
            raise
        samples.insert(i + 1, s_new)
        log.append({"interval": (float(lam_arr[i]), float(lam_arr[i + 1])),
                    "jump": float(jumps[i]), "inserted": lam_new, "status": "refined"})
        extra_budget -= 1

    return MassCurve(problem, samples, (lam_min, lam_max), log)


def curve_extrema(curve: MassCurve,
                  settings: SolverSettings = SolverSettings()) -> CurveExtrema:
    """Locate the curve maximum; golden-section refinement on fresh solves.

    A monotone curve yields a boundary supremum, flagged rather than refined.
    """
    if len(curve.samples) < 3:
        raise ValidationError("curve_extrema needs at least 3 samples")
    m = curve.masses
    lams = curve.lambdas
    i = int(np.argmax(m))
    trend = float(np.sign(m[-1] - m[-2]))
    if i == 0 or i == len(m) - 1:
        return CurveExtrema(float(m[i]), float(lams[i]), interior=False,
                            mass_at_lam_min=float(m[0]), trend_at_lam_max=trend)

    problem = curve.problem
    cache = {float(lams[j]): float(m[j]) for j in (i - 1, i, i + 1)}

    def mass_at(lam):
        if lam not in cache:
            cache[lam] = _solve_sample(problem, lam, settings,
                                       warm=curve.nearest_height(lam)).mass
        return cache[lam]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lams[i - 1]), float(lams[i + 1])
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = mass_at(c), mass_at(d)
    while b - a > 1e-6 * max(1.0, abs(a)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = mass_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = mass_at(d)
    lam_star = 0.5 * (a + b)
    b_val = max(mass_at(lam_star), fc, fd)
    return CurveExtrema(float(b_val), float(lam_star), interior=True,
                        mass_at_lam_min=float(m[0]), trend_at_lam_max=trend,
                        refined=True)


@dataclass
class LookupResult:
    """All multipliers whose ground state attains the prescribed mass."""

    roots: list                      # [(lam, GroundState)] sorted by lam
    warnings: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)


def mass_lookup(problem: RadialProblem, curve: MassCurve, c: float,
                settings: SolverSettings = SolverSettings(),
                rel_tol: float = 1e-8) -> LookupResult:
    """Solve m(lam) = c: every sign change of m - c on the grid is refined
    by root finding with fresh ground-state solves.  Returns an empty list
    when c is above the traced maximum."""
    if c <= 0:
        raise ValidationError("prescribed mass must be positive")
    m = curve.masses
    lams = curve.lambdas
    sign = np.sign(m - c)
    warnings = []
    roots = []
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        lo, hi = float(lams[i]), float(lams[i + 1])
        cache = {}

        def fval(lam):
            if lam not in cache:
                cache[lam] = shoot_ground_state(problem, lam, settings,
                                                warm_start=curve.nearest_height(lam))
            return cache[lam].mass - c

        lam_root = brentq(fval, lo, hi, rtol=1e-13, xtol=1e-13 * max(1.0, abs(lo)))
        gs = cache.get(lam_root) or shoot_ground_state(
            problem, lam_root, settings, warm_start=curve.nearest_height(lam_root))
        if abs(gs.mass - c) > rel_tol * c:
            raise NumericError(
                f"lookup root at lam={lam_root} misses the target mass: "
                f"|m-c|/c = {abs(gs.mass - c) / c:.3e}")
        roots.append((lam_root, gs))
        if i == 0 or i == len(m) - 2:
            warnings.append(
                f"root at lam={lam_root:.6g} sits in a boundary grid cell; "
                "roots beyond the traced range may be missed")
    # exact hits on grid samples (measure-zero but cheap to honor)
    for i in np.nonzero(sign == 0)[0]:
        lam0 = float(lams[i])
        gs = shoot_ground_state(problem, lam0, settings,
                                warm_start=curve.samples[i].height)
        roots.append((lam0, gs))
    roots.sort(key=lambda t: t[0])
    return LookupResult(roots, warnings)
