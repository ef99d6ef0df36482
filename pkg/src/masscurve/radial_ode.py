"""Adaptive integration of the radial equation u'' + (N-1)/r u' = lam*u - f(r,u).

Regular start at the origin via a short Taylor series (the (N-1)/r term is
removable but numerically awkward at r = 0), then an adaptive embedded
explicit stepper with terminal events for zero crossing and blow-up.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.special import gamma as gamma_fn

from .errors import EvaluationError, NumericError, ValidationError
from .problem import RadialProblem


def unit_sphere_area(N: int) -> float:
    """Surface area of the unit sphere in R^N."""
    return 2.0 * math.pi ** (N / 2.0) / gamma_fn(N / 2.0)


class EventKind(enum.Enum):
    REACHED_END = "reached_end"
    ZERO_CROSSING = "zero_crossing"
    BLOWUP = "blowup"


@dataclass(frozen=True)
class TerminalEvent:
    kind: EventKind
    radius: Optional[float] = None
    extra_index: Optional[int] = None  # which caller-supplied event fired, if any

    def __str__(self):
        if self.radius is None:
            return self.kind.value
        return f"{self.kind.value}@{self.radius:.17g}"


@dataclass(frozen=True)
class IntegratorSettings:
    rtol: float = 1e-11
    atol: float = 1e-14
    r_series_factor: float = 1e-4     # series patch is r_series_factor * r_end
    blowup_factor: float = 1e8        # U_max = blowup_factor * max(a, 1)
    max_steps: int = 1_000_000
    min_samples: int = 2001           # output grid is >= this many points
    samples_per_efold: float = 400.0  # extra resolution when sqrt(lam)*r_end is large

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValidationError("tolerances must be positive")
        if not (0 < self.r_series_factor < 0.5):
            raise ValidationError("r_series_factor must be in (0, 0.5)")
        if self.blowup_factor <= 0:
            raise ValidationError("blowup_factor must be positive")


@dataclass(frozen=True)
class RadialProfile:
    """Sampled radial function: strictly increasing grid from 0, values and slopes."""

    grid: np.ndarray
    u: np.ndarray
    du: np.ndarray
    terminal_event: TerminalEvent
    dimension: int

    def __post_init__(self):
        g = np.asarray(self.grid)
        if g.size < 2 or self.u.shape != g.shape or self.du.shape != g.shape:
            raise ValidationError("profile arrays must share a length >= 2")
        if g[0] != 0.0 or np.any(np.diff(g) <= 0):
            raise ValidationError("grid must be strictly increasing and start at 0")

    @property
    def r_end(self) -> float:
        return float(self.grid[-1])

    def spline(self) -> CubicSpline:
        return CubicSpline(self.grid, self.u)

    def dspline(self) -> CubicSpline:
        return CubicSpline(self.grid, self.du)

    @staticmethod
    def zero(dimension: int, r_end: float, n: int = 64) -> "RadialProfile":
        g = np.linspace(0.0, r_end, n)
        z = np.zeros_like(g)
        return RadialProfile(g, z, z.copy(), TerminalEvent(EventKind.REACHED_END), dimension)


def _series_state(problem: RadialProblem, lam: float, a: float, r: float):
    """Fourth-order origin series u = a + c2 r^2 + c4 r^4 (odd terms vanish)."""
    N = problem.dimension
    f0 = float(problem.f(0.0, a))
    fu0 = float(problem.f_u(0.0, a))
    c2 = (lam * a - f0) / (2.0 * N)
    c4 = (lam - fu0) * c2 / (4.0 * N + 8.0)
    u = a + c2 * r * r + c4 * r**4
    du = 2.0 * c2 * r + 4.0 * c4 * r**3
    return u, du, (c2, c4)


def _rhs(problem: RadialProblem, lam: float):
    N1 = problem.dimension - 1.0

    def rhs(r, y):
        u, w = y
        fval = problem.f(r, u)
        return (w, -N1 / r * w + lam * u - fval)

    return rhs


def integrate(problem: RadialProblem, lam: float, a: float, r_end: float,
              settings: IntegratorSettings = IntegratorSettings(),
              extra_events: tuple = ()) -> RadialProfile:
    """Integrate u(0)=a, u'(0)=0 out to r_end or the first terminal event.

    Terminal events: u crosses zero, |u| exceeds the blow-up threshold, or
    r_end is reached.  ``extra_events`` lets internal callers (the whole-space
    solver) add their own terminal events; they must accept (r, y).
    """
    if a < 0:
        raise ValidationError("shooting height a must be >= 0")
    if r_end <= 0:
        raise ValidationError("r_end must be positive")
    if a == 0.0:
        return RadialProfile.zero(problem.dimension, r_end)

    r_series = settings.r_series_factor * r_end
    u0, du0, _ = _series_state(problem, lam, a, r_series)
    u_max = settings.blowup_factor * max(a, 1.0)

    def ev_cross(r, y):
        return y[0]

    ev_cross.terminal = True
    ev_cross.direction = -1.0

    def ev_blow(r, y):
        return abs(y[0]) - u_max

    ev_blow.terminal = True
    ev_blow.direction = 1.0

    events = [ev_cross, ev_blow] + list(extra_events)
    sol = solve_ivp(_rhs(problem, lam), (r_series, r_end), (u0, du0),
                    method="DOP853", rtol=settings.rtol, atol=settings.atol * max(a, 1.0),
                    dense_output=True, events=events)
    if sol.status == -1 or not np.all(np.isfinite(sol.y)):
        raise NumericError(f"integration failed: {sol.message}",
                           last_radius=float(sol.t[-1]) if sol.t.size else r_series)
    if sol.t.size > settings.max_steps:
        raise NumericError("step budget exhausted", last_radius=float(sol.t[-1]))

    r_stop = float(sol.t[-1])
    event = TerminalEvent(EventKind.REACHED_END)
    if sol.status == 1:
        hits = [(t[0], i) for i, t in enumerate(sol.t_events) if len(t)]
        t0, idx = min(hits)
        r_stop = float(t0)
        if idx == 0:
            event = TerminalEvent(EventKind.ZERO_CROSSING, r_stop)
        elif idx == 1:
            event = TerminalEvent(EventKind.BLOWUP, r_stop)
        else:
            event = TerminalEvent(EventKind.REACHED_END, r_stop, extra_index=idx - 2)

    # output grid: series patch + uniform sampling of the dense solution,
    # refined when the decay scale sqrt(lam) is fast relative to the domain
    efolds = math.sqrt(max(lam, 0.0)) * r_stop
    n = max(settings.min_samples, int(settings.samples_per_efold * efolds) + 1)
    if n % 2 == 0:
        n += 1
    grid_main = np.linspace(r_series, r_stop, n)
    grid_ser = np.linspace(0.0, r_series, 9)[:-1]
    u_ser, du_ser, _ = _series_state(problem, lam, a, grid_ser)
    y_main = sol.sol(grid_main)
    grid = np.concatenate([grid_ser, grid_main])
    u = np.concatenate([np.atleast_1d(u_ser), y_main[0]])
    du = np.concatenate([np.atleast_1d(du_ser), y_main[1]])
    if not np.all(np.isfinite(u)):
        raise EvaluationError("NaN in integrated profile", point=r_stop)
    return RadialProfile(grid, u, du, event, problem.dimension)


def h1_norm_sq_weighted(grid, u, du, N: int) -> float:
    """omega_{N-1} * int (du^2 + u^2) r^(N-1) dr on the given grid."""
    w = grid ** (N - 1)
    return unit_sphere_area(N) * float(simpson((du * du + u * u) * w, x=grid))


def h1_distance(pA: RadialProfile, pB: RadialProfile) -> float:
    """H^1(R^N) distance between two radial profiles, zero-extended.

    Both profiles are cubic-interpolated onto a common dense grid; beyond a
    profile's own grid it is extended by zero.
    """
    if pA.dimension != pB.dimension:
        raise ValidationError(
            f"dimension mismatch: {pA.dimension} vs {pB.dimension}")
    N = pA.dimension
    r_max = max(pA.r_end, pB.r_end)
    dense = np.unique(np.concatenate([
        np.linspace(0.0, r_max, 8001), pA.grid, pB.grid]))

    def eval_zero_ext(p: RadialProfile):
        su, sd = p.spline(), p.dspline()
        inside = dense <= p.r_end
        u = np.where(inside, su(np.clip(dense, 0.0, p.r_end)), 0.0)
        du = np.where(inside, sd(np.clip(dense, 0.0, p.r_end)), 0.0)
        return u, du

    uA, dA = eval_zero_ext(pA)
    uB, dB = eval_zero_ext(pB)
    w = dense ** (N - 1)
    val = simpson(((dA - dB) ** 2 + (uA - uB) ** 2) * w, x=dense)
    return math.sqrt(max(float(val), 0.0) * unit_sphere_area(N))


def resample(profile: RadialProfile, grid: np.ndarray) -> RadialProfile:
    """Cubic resampling of a profile onto a new grid (within its support)."""
    su, sd = profile.spline(), profile.dspline()
    return replace(profile, grid=np.asarray(grid, dtype=float),
                   u=su(grid), du=sd(grid))


def profile_to_csv(profile: RadialProfile, path, *, lam=None, a=None) -> None:
    """CSV export: one comment header recording N, lambda, a and the event."""
    with open(path, "w") as fh:
        fh.write(f"# N={profile.dimension} lambda={_g(lam)} a={_g(a)} "
                 f"event={profile.terminal_event}\n")
        fh.write("r,u,du\n")
        for r, u, du in zip(profile.grid, profile.u, profile.du):
            fh.write(f"{r:.17g},{u:.17g},{du:.17g}\n")


def _g(x):
    return "nan" if x is None else f"{x:.17g}"
