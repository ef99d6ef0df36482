"""Large-multiplier rescaling v(rho) = lam^(-1/(p-2)) u(rho/sqrt(lam)) and its limits.

After rescaling, ground states on the ball solve a whole-space-type equation
on the stretched ball of radius sqrt(lam) R and converge to the soliton Q;
the squared mass obeys |u|^2 = lam^(2/(p-2) - N/2) |v|^2 exactly under the
change of variables.  This module implements the rescaling, the comparison to
Q (with d(0)-renormalization) and the regime-dispatched limit checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, ValidationError
from .groundstate import GroundState, QProfile, mass, gradient_norm_sq
from .problem import RadialProblem, Regime
from .radial_ode import RadialProfile, h1_distance, unit_sphere_area
from .report import FAIL, PASS, ConditionReport
from scipy.integrate import simpson


def mass_scaling_exponent(N: int, p: float) -> float:
    """Exponent in |u_lam|^2 = lam^e |v_mu|^2: e = 2/(p-2) - N/2."""
    return 2.0 / (p - 2.0) - N / 2.0


@dataclass(frozen=True)
class RescaledState:
    """Ground state in stretched coordinates, mu = 1/lam in (0,1)."""

    problem: RadialProblem
    lam: float
    profile: RadialProfile          # v on [0, sqrt(lam) R]
    mass: float                     # |v|^2 on the stretched ball
    source_mass: float              # |u_lam|^2 before rescaling

    @property
    def mu(self) -> float:
        return 1.0 / self.lam

    def mass_identity_defect(self) -> float:
        """Relative defect of the change-of-variables mass identity."""
        N, p = self.problem.dimension, self.problem.exponent
        pred = self.lam ** mass_scaling_exponent(N, p) * self.mass
        return abs(self.source_mass - pred) / self.source_mass


def rescale(gs: GroundState) -> RescaledState:
    """Stretch a ground state with lam > 1 onto the ball of radius sqrt(lam) R."""
    lam = gs.lam
    if lam <= 1.0:
        raise DomainError(f"rescaling requires lam > 1, got lam={lam}")
    p = gs.problem.exponent
    amp = lam ** (-1.0 / (p - 2.0))
    prof = gs.profile
    v = replace(prof,
                grid=prof.grid * math.sqrt(lam),
                u=prof.u * amp,
                du=prof.du * amp / math.sqrt(lam))
    return RescaledState(gs.problem, lam, v, mass(v, gs.problem.dimension), gs.mass)


def equation_residual(rs: RescaledState) -> float:
    """Relative weak-form residual of the stretched equation, tested against v.

    Computes ||grad v|^2 + |v|^2 - mu^((p-1)/(p-2)) int f(mu^(1/2) rho,
    mu^(-1/(p-2)) v) v| / (|grad v|^2 + |v|^2) by quadrature.
    """
    problem, lam = rs.problem, rs.lam
    N, p = problem.dimension, problem.exponent
    mu = rs.mu
    prof = rs.profile
    quad = gradient_norm_sq(prof, N) + mass(prof, N)
    w = prof.grid ** (N - 1)
    fval = problem.f(math.sqrt(mu) * prof.grid, prof.u * mu ** (-1.0 / (p - 2.0)))
    nonlin = (mu ** ((p - 1.0) / (p - 2.0)) * unit_sphere_area(N)
              * float(simpson(fval * prof.u * w, x=prof.grid)))
    return abs(quad - nonlin) / quad


def rescaled_energy(rs: RescaledState) -> float:
    """Diagnostic energy of the stretched state (reported, never asserted)."""
    problem = rs.problem
    N, p = problem.dimension, problem.exponent
    mu = rs.mu
    prof = rs.profile
    w = prof.grid ** (N - 1)
    Fval = problem.F(math.sqrt(mu) * prof.grid, prof.u * mu ** (-1.0 / (p - 2.0)))
    Fint = unit_sphere_area(N) * float(simpson(Fval * w, x=prof.grid))
    return 0.5 * (gradient_norm_sq(prof, N) + mass(prof, N)) - mu ** (p / (p - 2.0)) * Fint


def renormalized_q_profile(q: QProfile, d0: float) -> RadialProfile:
    """Soliton matched to weight value d(0): amplitude scaled by d0^(-1/(p-2))."""
    amp = d0 ** (-1.0 / (q.exponent - 2.0))
    prof = q.extended_profile()
    return replace(prof, u=prof.u * amp, du=prof.du * amp)


def renormalized_q_mass(q: QProfile, d0: float) -> float:
    return q.mass * d0 ** (-2.0 / (q.exponent - 2.0))


def compare_to_Q(rs: RescaledState, q: QProfile) -> float:
    """H^1 distance between the zero-extended stretched state and the soliton."""
    if rs.problem.dimension != q.dimension:
        raise ValidationError(
            f"dimension mismatch: {rs.problem.dimension} vs {q.dimension}")
    if rs.problem.exponent != q.exponent:
        raise ValidationError(
            f"exponent mismatch: {rs.problem.exponent} vs {q.exponent}")
    return h1_distance(rs.profile, renormalized_q_profile(q, rs.problem.d0))


def verify_limits(problem: RadialProblem, curve, q: QProfile,
                  slope_tol: float = 0.05, critical_tol: float = 0.03,
                  intercept_tol: float = 0.10) -> ConditionReport:
    """Regime-dispatched checks of the mass-curve tail against the soliton mass.

    Supercritical / subcritical: least-squares slope of log m vs log lam over
    the last decade of the traced range must match 2/(p-2) - N/2; in the
    supercritical case the intercept must be consistent with the renormalized
    soliton mass.  Critical: the final mass must sit within ``critical_tol``
    of the renormalized soliton mass.
    """
    N, p = problem.dimension, problem.exponent
    lams, masses = curve.lambdas, curve.masses
    lam_max = lams[-1]
    sel = lams >= lam_max / 10.0
    if int(np.sum(sel)) < 5 or lam_max <= 1.0:
        raise ValidationError(
            "insufficient tail samples for limit verification; trace further")
    regime = problem.regime
    q_mass_hat = renormalized_q_mass(q, problem.d0)
    predicted = mass_scaling_exponent(N, p)

    rep = ConditionReport(metadata={
        "regime": regime.value, "q_mass": q.mass, "q_mass_renormalized": q_mass_hat,
        "lam_max": float(lam_max), "tail_mass": float(masses[-1]),
        "slope_predicted": predicted, "tail_points": int(np.sum(sel)),
    })

    if regime is Regime.MASS_CRITICAL:
        ratio = float(masses[-1]) / q_mass_hat
        rep.add("critical_mass_limit", PASS if abs(ratio - 1.0) < critical_tol else FAIL,
                values={"ratio": ratio, "tolerance": critical_tol})
        rep.metadata["slope_fit"] = None
        return rep

    slope, logc = np.polyfit(np.log(lams[sel]), np.log(masses[sel]), 1)
    rep.metadata["slope_fit"] = float(slope)
    rep.metadata["intercept"] = float(np.exp(logc))
    ok = abs(slope - predicted) <= slope_tol * abs(predicted)
    rep.add("tail_slope", PASS if ok else FAIL,
            values={"fit": float(slope), "predicted": predicted, "tolerance": slope_tol})
    if regime is Regime.SUPERCRITICAL:
        ratio = float(np.exp(logc)) / q_mass_hat
        rep.add("tail_intercept", PASS if abs(ratio - 1.0) < intercept_tol else FAIL,
                values={"ratio": ratio, "tolerance": intercept_tol})
    return rep
