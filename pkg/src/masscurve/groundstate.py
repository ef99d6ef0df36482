"""Shooting solvers for positive Dirichlet ground states and the whole-space soliton.

The ball ground state at a given multiplier lam is found by monotone bisection
on the shooting height a = u(0): the first-crossing radius rho(a) decreases in
a, and the ground state is the height whose first zero lands on the boundary.
Past a lam-dependent scale the crossing cannot be pinned to the boundary in
double precision (perturbations of the height grow like exp(sqrt(lam) r)), so
the solver completes the far tail with a finite-difference Newton boundary
solve; the achieved matching data are recorded in the diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded
from scipy.special import gammaincc

from .errors import AmbiguityError, DomainError, NumericError, ValidationError
from .fdgrid import RadialGrid, apply_operator, solve_tridiagonal
from .problem import RadialProblem, Weight, Perturbation, sobolev_exponent
from .radial_ode import (EventKind, IntegratorSettings, RadialProfile,
                         TerminalEvent, integrate, unit_sphere_area)


# ---------------------------------------------------------------------------
# quadrature diagnostics

def mass(profile: RadialProfile, N: int) -> float:
    """Squared L^2 norm over the ball: omega_{N-1} int u^2 r^(N-1) dr."""
    w = profile.grid ** (N - 1)
    return unit_sphere_area(N) * float(simpson(profile.u**2 * w, x=profile.grid))


def gradient_norm_sq(profile: RadialProfile, N: int) -> float:
    w = profile.grid ** (N - 1)
    return unit_sphere_area(N) * float(simpson(profile.du**2 * w, x=profile.grid))


def energy(profile: RadialProfile, lam: float, problem: RadialProblem) -> float:
    """J(u) = (|grad u|^2 + lam |u|^2)/2 - int F(r,u)."""
    N = problem.dimension
    w = profile.grid ** (N - 1)
    Fint = unit_sphere_area(N) * float(
        simpson(problem.F(profile.grid, profile.u) * w, x=profile.grid))
    return 0.5 * (gradient_norm_sq(profile, N) + lam * mass(profile, N)) - Fint


def nehari_residual(profile: RadialProfile, lam: float, problem: RadialProblem) -> float:
    """|grad u|^2 + lam |u|^2 - int f(r,u) u; zero exactly on solutions."""
    N = problem.dimension
    w = profile.grid ** (N - 1)
    fu = unit_sphere_area(N) * float(
        simpson(problem.f(profile.grid, profile.u) * profile.u * w, x=profile.grid))
    return gradient_norm_sq(profile, N) + lam * mass(profile, N) - fu


# ---------------------------------------------------------------------------
# first Dirichlet eigenvalue

def _linear_crossing_radius(N: int, kappa: float, r_end: float, rtol: float = 1e-12) -> float:
    """First zero of u'' + (N-1)/r u' + kappa u = 0, u(0)=1, u'(0)=0; inf if none."""
    rs = 1e-6 * r_end
    c2 = -kappa / (2.0 * N)
    c4 = -kappa * c2 / (4.0 * N + 8.0)
    y0 = (1.0 + c2 * rs * rs + c4 * rs**4, 2.0 * c2 * rs + 4.0 * c4 * rs**3)

    def rhs(r, y):
        return (y[1], -(N - 1.0) / r * y[1] - kappa * y[0])

    def ev(r, y):
        return y[0]

    ev.terminal, ev.direction = True, -1.0
    sol = solve_ivp(rhs, (rs, r_end), y0, method="DOP853",
                    rtol=rtol, atol=1e-14, events=[ev])
    if sol.t_events[0].size:
        return float(sol.t_events[0][0])
    return math.inf


@lru_cache(maxsize=None)
def _lambda1_unit(N: int, tol: float) -> float:
    lo, hi = 1.0, 4.0 * N * N
    r_end = 3.0 * N + 3.0
    if not (_linear_crossing_radius(N, lo, r_end) > 1.0 > _linear_crossing_radius(N, hi, r_end)):
        raise NumericError("eigenvalue bracket failure on the unit ball")
    while hi - lo > tol * lo:
        mid = 0.5 * (lo + hi)
        if _linear_crossing_radius(N, mid, r_end) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def first_dirichlet_eigenvalue(N: int, R: float, tol: float = 1e-10) -> float:
    """Smallest Dirichlet eigenvalue of -Laplace on the ball B_R.

    Computed once on the unit ball by bisection on the first-crossing radius,
    then scaled by 1/R^2 (exact similarity of the Laplacian).
    """
    if N < 2:
        raise ValidationError(f"dimension must be >= 2, got N={N}")
    if R <= 0:
        raise ValidationError("radius must be positive")
    return _lambda1_unit(N, float(tol)) / (R * R)


# ---------------------------------------------------------------------------
# ball ground state by shooting

@dataclass(frozen=True)
class SolverSettings:
    integrator: IntegratorSettings = field(default_factory=IntegratorSettings)
    crossing_rtol: float = 1e-10      # accept when |rho(a) - R| < crossing_rtol * R
    height_rtol: float = 1e-9         # also pin a* itself (mass conditioning near -lambda_1)
    tail_trigger: float = 1e-6        # fall back to tail completion beyond this gap
    tail_trust: float = 1e-5          # shot profile trusted down to u >= trust * max u
    expansion_budget: int = 200
    max_bisections: int = 200
    eigen_margin: float = 1e-6        # required clearance above -lambda_1
    boundary_tol: float = 1e-7


@dataclass(frozen=True)
class GroundState:
    """Positive Dirichlet ground state at multiplier lam, with diagnostics."""

    problem: RadialProblem
    lam: float
    profile: RadialProfile
    height: float                 # a* = u(0)
    mass: float                   # squared L^2 norm
    energy: float
    nehari_residual: float
    gradient_norm_sq: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def relative_residual(self) -> float:
        scale = self.gradient_norm_sq + abs(self.lam) * self.mass
        return abs(self.nehari_residual) / scale if scale > 0 else 0.0

    def to_scalars(self) -> dict:
        return {
            "lambda": self.lam,
            "a0": self.height,
            "mass": self.mass,
            "energy": self.energy,
            "residual": self.nehari_residual,
            "relative_residual": self.relative_residual,
            "gradient_norm_sq": self.gradient_norm_sq,
        }


def _crossing_radius(problem, lam, a, settings):
    """rho(a): radius of the first zero, +inf when no zero before 1.05 R."""
    prof = integrate(problem, lam, a, 1.05 * problem.radius, settings.integrator)
    if prof.terminal_event.kind is EventKind.ZERO_CROSSING:
        return prof.terminal_event.radius, prof
    return math.inf, prof


def _check_monotone(samples, R):
    """Shooting map must switch from 'no crossing before R' to 'crossing' once."""
    pts = sorted(samples.items())
    flags = [rho < R for _, (rho, _) in pts]
    switches = [i for i in range(1, len(flags)) if flags[i] != flags[i - 1]]
    downs = [i for i in switches if flags[i - 1] and not flags[i]]
    if downs:
        brackets = [(pts[i - 1][0], pts[i][0]) for i in switches]
        raise AmbiguityError(
            "non-monotone shooting map: multiple candidate heights "
            f"(brackets: {brackets}); the positive solution may be non-unique",
            brackets=brackets)


def _tail_bvp(problem, lam, r_t, u_t, R, n):
    """Newton solve of the radial equation on [r_t, R], u(r_t)=u_t, u(R)=0."""
    N1 = problem.dimension - 1.0
    grid = np.linspace(r_t, R, n + 1)
    h = grid[1] - grid[0]
    k = math.sqrt(max(lam, 1.0))
    u = u_t * np.sinh(k * (R - grid)) / math.sinh(k * (R - r_t))
    u[0], u[-1] = u_t, 0.0
    ri = grid[1:-1]
    for _ in range(60):
        ui = u[1:-1]
        upp = (u[2:] - 2.0 * ui + u[:-2]) / (h * h)
        up = (u[2:] - u[:-2]) / (2.0 * h)
        Fres = upp + N1 / ri * up - lam * ui + problem.f(ri, ui)
        sub = 1.0 / (h * h) - N1 / (2.0 * h * ri)
        sup = 1.0 / (h * h) + N1 / (2.0 * h * ri)
        dia = -2.0 / (h * h) - lam + problem.f_u(ri, ui)
        ab = np.zeros((3, ri.size))
        ab[0, 1:] = sup[:-1]
        ab[1] = dia
        ab[2, :-1] = sub[1:]
        delta = solve_banded((1, 1), ab, -Fres)
        u[1:-1] += delta
        if np.max(np.abs(delta)) <= 1e-13 * max(abs(u_t), 1e-300):
            break
    else:
        raise NumericError("tail boundary solve did not converge", last_radius=r_t)
    du = np.gradient(u, grid, edge_order=2)
    return grid, u, du


def _complete_tail(problem, lam, prof, settings):
    """Replace the noise-dominated far tail of a shot profile by a BVP solve."""
    R = problem.radius
    umax = float(np.max(prof.u))
    trust = settings.tail_trust * umax
    ok = np.nonzero(prof.u >= trust)[0]
    i_t = int(ok[-1])
    if prof.grid[i_t] >= R:
        raise NumericError("tail completion requested but profile is trusted to R")
    r_t, u_t = float(prof.grid[i_t]), float(prof.u[i_t])
    efolds = math.sqrt(max(lam, 1.0)) * (R - r_t)
    n = int(min(max(64.0 * efolds, 400), 60000))
    tg, tu, tdu = _tail_bvp(problem, lam, r_t, u_t, R, n)
    grid = np.concatenate([prof.grid[: i_t + 1], tg[1:]])
    u = np.concatenate([prof.u[: i_t + 1], tu[1:]])
    du = np.concatenate([prof.du[: i_t + 1], tdu[1:]])
    event = TerminalEvent(EventKind.ZERO_CROSSING, R)
    return RadialProfile(grid, u, du, event, problem.dimension), r_t


def shoot_ground_state(problem: RadialProblem, lam: float,
                       settings: SolverSettings = SolverSettings(),
                       warm_start: Optional[float] = None) -> GroundState:
    """Positive ground state with u = 0 on the boundary, by shooting.

    Raises DomainError below the first eigenvalue, NumericError when no
    shooting bracket exists (e.g. a linear equation), and AmbiguityError when
    the shooting map is detectably non-monotone.
    """
    R = problem.radius
    lam1 = first_dirichlet_eigenvalue(problem.dimension, R)
    if lam <= -lam1 + settings.eigen_margin * (1.0 + lam1):
        raise DomainError(
            f"no positive solution expected at lam={lam} <= -lambda_1 = {-lam1}",
            kind="below_first_eigenvalue")

    samples: dict = {}

    def rho(a):
        if a not in samples:
            samples[a] = _crossing_radius(problem, lam, a, settings)
        return samples[a][0]

    a = float(warm_start) if warm_start else 1.0
    a_lo = a_hi = None
    if rho(a) > R:
        a_lo = a
        for _ in range(settings.expansion_budget):
            a *= 2.0
            if rho(a) < R:
                a_hi = a
                break
            a_lo = a
    else:
        a_hi = a
        for _ in range(settings.expansion_budget):
            a *= 0.5
            if rho(a) > R:
                a_lo = a
                break
            a_hi = a
    if a_lo is None or a_hi is None:
        raise NumericError(
            "no shooting bracket found within the expansion budget "
            f"(lam={lam}); the crossing radius may not depend on the height")
    _check_monotone(samples, R)

    best = None  # (gap, a, profile) over crossing-side evaluations

    def consider(a_val):
        nonlocal best
        r_val, prof_val = samples[a_val]
        if r_val < math.inf:
            gap_val = abs(r_val - R)
            if best is None or gap_val < best[0]:
                best = (gap_val, a_val, prof_val)

    for a_seen in list(samples):   # bracket-expansion shots count too
        consider(a_seen)
    for _ in range(settings.max_bisections):
        # the radius gap alone under-determines a* near -lambda_1 (the
        # crossing radius is nearly height-independent there), so the height
        # bracket must collapse as well before the solve is accepted
        if (best is not None and best[0] < settings.crossing_rtol * R
                and a_hi - a_lo <= settings.height_rtol * a_hi):
            break
        a_mid = 0.5 * (a_lo + a_hi)
        rho(a_mid)
        consider(a_mid)
        if samples[a_mid][0] > R:
            a_lo = a_mid
        else:
            a_hi = a_mid
        if a_hi - a_lo <= 8.0 * np.finfo(float).eps * a_hi:
            break
    _check_monotone(samples, R)
    if best is None:
        raise NumericError(f"bisection found no crossing profile at lam={lam}")

    gap, a_star, prof = best
    diagnostics = {"crossing_gap": gap, "tail_completed": False,
                   "evaluations": len(samples)}
    if gap > settings.tail_trigger * R:
        prof, r_t = _complete_tail(problem, lam, prof, settings)
        diagnostics["tail_completed"] = True
        diagnostics["tail_match_radius"] = r_t

    interior = prof.u[:-1]
    if np.any(interior[prof.grid[:-1] < prof.r_end * (1 - 1e-12)] <= 0.0):
        raise NumericError(f"computed profile is not positive inside the ball (lam={lam})")
    diagnostics["monotone_decreasing"] = bool(np.all(np.diff(prof.u) <= 0.0))
    diagnostics["boundary_value"] = float(prof.u[-1])

    N = problem.dimension
    m = mass(prof, N)
    gsq = gradient_norm_sq(prof, N)
    return GroundState(
        problem=problem, lam=lam, profile=prof, height=a_star, mass=m,
        energy=energy(prof, lam, problem),
        nehari_residual=nehari_residual(prof, lam, problem),
        gradient_norm_sq=gsq, diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# whole-space soliton

@dataclass(frozen=True)
class QProfile:
    """Positive decreasing solution of -Lap v + v = v^(p-1) on R^N.

    The stored profile ends at r_cut; beyond it the solution is represented by
    the fitted exponential tail tail_coef * exp(-r), whose squared-mass
    contribution is included analytically in ``mass``.
    """

    dimension: int
    exponent: float
    profile: RadialProfile
    height: float
    mass: float
    tail_coef: float
    tail_rate: float
    tail_fit_dev: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def r_cut(self) -> float:
        return self.profile.r_end

    def extended_profile(self, r_far: float = None) -> RadialProfile:
        """Profile with fitted exponential tail samples appended."""
        r_far = self.r_cut + 14.0 if r_far is None else r_far
        tail_r = np.linspace(self.r_cut, r_far, 600)[1:]
        tail_u = self.tail_coef * np.exp(-self.tail_rate * tail_r)
        tail_du = -self.tail_rate * tail_u
        return RadialProfile(
            np.concatenate([self.profile.grid, tail_r]),
            np.concatenate([self.profile.u, tail_u]),
            np.concatenate([self.profile.du, tail_du]),
            TerminalEvent(EventKind.REACHED_END), self.dimension)

    def to_scalars(self) -> dict:
        return {
            "dimension": self.dimension, "exponent": self.exponent,
            "q0": self.height, "q_mass": self.mass,
            "tail_coef": self.tail_coef, "tail_rate": self.tail_rate,
            "tail_fit_dev": self.tail_fit_dev, "r_cut": self.r_cut,
        }


def _pure_power_problem(N, p):
    # radius placeholder: the whole-space solve never uses it
    return RadialProblem(N, p, 1.0, Weight.constant(1.0), Perturbation.none(),
                         label="pure-power")


def solve_whole_space_Q(N: int, p: float,
                        settings: SolverSettings = SolverSettings()) -> QProfile:
    """Whole-space soliton by shooting on the separating height.

    Heights above the soliton height give a zero crossing; heights below give
    a profile that turns around and grows.  Bisection separates the two, the
    decaying solution is integrated until u < 1e-8 * u(0), and an exponential
    tail is fitted on the last decade.
    """
    if not (2.0 < p < sobolev_exponent(N)):
        raise ValidationError(f"exponent p={p} outside (2, 2*) for N={N}")
    problem = _pure_power_problem(N, p)
    r_max = 60.0

    def ev_turn(r, y):
        return y[1]

    ev_turn.terminal, ev_turn.direction = True, 1.0

    def classify(a):
        prof = integrate(problem, 1.0, a, r_max, settings.integrator,
                         extra_events=(ev_turn,))
        return prof.terminal_event

    a_lo, a_hi = None, None
    a = 2.0
    for _ in range(settings.expansion_budget):
        kind = classify(a).kind
        if kind is EventKind.ZERO_CROSSING:
            a_hi = a
            break
        a_lo = a
        a *= 2.0
    if a_hi is None:
        raise NumericError("no crossing height found for the whole-space solve")
    if a_lo is None:
        a_lo = 1.0 + 1e-9  # u == 1 is the constant solution; the soliton sits above
    for _ in range(settings.max_bisections):
        a_mid = 0.5 * (a_lo + a_hi)
        if classify(a_mid).kind is EventKind.ZERO_CROSSING:
            a_hi = a_mid
        else:
            a_lo = a_mid
        if a_hi - a_lo <= 4.0 * np.finfo(float).eps * a_hi:
            break
    a_star = 0.5 * (a_lo + a_hi)

    thresh = 1e-8 * a_star

    def ev_thresh(r, y):
        return y[0] - thresh

    ev_thresh.terminal, ev_thresh.direction = True, -1.0
    prof = integrate(problem, 1.0, a_star, r_max, settings.integrator,
                     extra_events=(ev_turn, ev_thresh))
    ev = prof.terminal_event
    if ev.kind is EventKind.REACHED_END and ev.extra_index == 1:
        i_cut = prof.grid.size - 1
    else:
        # departed before reaching the threshold: truncate at the minimum
        i_cut = int(np.argmin(prof.u))
    grid, u, du = prof.grid[: i_cut + 1], prof.u[: i_cut + 1], prof.du[: i_cut + 1]
    if np.any(np.diff(u) > 0):
        raise NumericError("whole-space profile is not monotone decreasing")
    r_cut, u_cut = float(grid[-1]), float(u[-1])

    # exponential fit C exp(-rate * r) over the last decade of u
    sel = (u <= 10.0 * u_cut) & (u > 0)
    logs = np.log(u[sel])
    A = np.vstack([np.ones(logs.size), -grid[sel]]).T
    (b0, rate), *_ = np.linalg.lstsq(A, logs, rcond=None)
    C = math.exp(b0)
    fit_dev = float(np.max(np.abs(A @ np.array([b0, rate]) - logs)))

    core = RadialProfile(grid, u, du, TerminalEvent(EventKind.REACHED_END),
                         N)
    w = grid ** (N - 1)
    bulk = unit_sphere_area(N) * float(simpson(u * u * w, x=grid))
    # int_{r_cut}^inf C^2 exp(-2 rate r) r^(N-1) dr = C^2 Gamma(N, 2 rate r_cut)/(2 rate)^N
    tail = (unit_sphere_area(N) * C * C * math.gamma(N)
            * float(gammaincc(N, 2.0 * rate * r_cut)) / (2.0 * rate) ** N)
    diag = {"bracket": (a_lo, a_hi), "bulk_mass": bulk, "tail_mass": tail,
            "threshold_reached": bool(ev.kind is EventKind.REACHED_END and ev.extra_index == 1)}
    return QProfile(N, p, core, a_star, bulk + tail, C, float(rate), fit_dev, diag)


def q_mass_gradient_flow(N: int, p: float, extent: float = 24.0, n: int = 6000,
                         tol: float = 1e-13, max_iter: int = 500) -> float:
    """Soliton squared mass by normalized imaginary-time iteration on an FD grid.

    Preconditioned gradient flow with amplitude renormalization each step:
    u <- M^gamma (-Lap + 1)^{-1} u^(p-1), M the Rayleigh-type ratio.  Fully
    independent of the shooting path (different discretization and algorithm).
    """
    grid = RadialGrid(N, extent, n)
    r = grid.nodes
    V = np.ones(n)
    u = np.exp(-(r * r))
    gamma = (p - 1.0) / (p - 2.0)
    wq = grid.node_weight
    for _ in range(max_iter):
        rhs = u ** (p - 1.0)
        num = float(np.dot(wq * u, apply_operator(grid, V, u)))
        den = float(np.dot(wq * u, rhs))
        M = num / den
        u_new = M**gamma * solve_tridiagonal(grid, V, rhs)
        change = float(np.max(np.abs(u_new - u)) / np.max(np.abs(u_new)))
        u = u_new
        if change < tol:
            break
    else:
        raise NumericError("normalized flow did not converge")
    return grid.integral(u * u)
