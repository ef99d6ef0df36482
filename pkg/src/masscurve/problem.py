"""Radial problem instances: -u'' - (N-1)/r u' + lam*u = d(r)|u|^(p-2)u + g(r,u) on a ball.

The problem owns the dimension, the power p, the ball radius, the radial
weight d and the lower-order perturbation g, and classifies the
mass-criticality regime against the threshold p = 2 + 4/N.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import EvaluationError, ValidationError
from .report import FAIL, PASS, ConditionReport


class Regime(enum.Enum):
    """Position of p relative to the mass-critical exponent 2 + 4/N."""

    SUBCRITICAL = "subcritical"
    MASS_CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


def sobolev_exponent(N: int):
    """Critical Sobolev exponent 2N/(N-2); +inf in dimension 2."""
    if N < 2:
        raise ValidationError(f"dimension must be >= 2, got N={N}")
    if N == 2:
        return math.inf
    return 2.0 * N / (N - 2)


def classify_regime(N: int, p) -> Regime:
    """Compare p against 2 + 4/N.  Exact comparison, no tolerance.

    Rational inputs (int / Fraction) are compared in exact arithmetic so the
    verdict does not depend on how the same rational is written down.
    """
    if N < 2:
        raise ValidationError(f"dimension must be >= 2, got N={N}")
    two_star = sobolev_exponent(N)
    pf = float(p)
    if not (2.0 < pf < two_star):
        raise ValidationError(
            f"exponent p={p} outside the admissible range (2, {two_star})"
        )
    if isinstance(p, (int, Fraction)):
        crit = Fraction(2) + Fraction(4, N)
        p_cmp, c_cmp = Fraction(p), crit
    else:
        p_cmp, c_cmp = pf, 2.0 + 4.0 / N
    if p_cmp > c_cmp:
        return Regime.SUPERCRITICAL
    if p_cmp == c_cmp:
        return Regime.MASS_CRITICAL
    return Regime.SUBCRITICAL


@dataclass(frozen=True)
class Weight:
    """Radial weight d(r) with derivative.  Immutable and shareable."""

    fn: Callable[[float], float]
    deriv: Callable[[float], float]
    family: str = "custom"
    params: dict = field(default_factory=dict)

    @staticmethod
    def constant(value: float = 1.0) -> "Weight":
        return Weight(lambda r: value + 0.0 * np.asarray(r), lambda r: 0.0 * np.asarray(r),
                      family="constant", params={"value": value})

    @staticmethod
    def inverse_power(k: float, s: float) -> "Weight":
        """Built-in family d(r) = (1 + r^k)^(-s), exact derivative."""
        if k < 0:
            raise ValidationError("inverse_power weight needs k >= 0")

        def fn(r):
            r = np.asarray(r, dtype=float)
            return (1.0 + r**k) ** (-s)

        def deriv(r):
            r = np.asarray(r, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = -s * k * r ** (k - 1.0) * (1.0 + r**k) ** (-s - 1.0)
            return np.where(r == 0.0, 0.0 if k != 1.0 else -s * k, out)

        return Weight(fn, deriv, family="inverse_power", params={"k": k, "s": s})


@dataclass(frozen=True)
class Perturbation:
    """Lower-order term g(r,u) with partial derivative g_u and antiderivative G."""

    fn: Callable[[float, float], float]
    du: Callable[[float, float], float]
    antiderivative: Optional[Callable[[float, float], float]] = None
    family: str = "custom"

    @staticmethod
    def none() -> "Perturbation":
        zero = lambda r, u: 0.0 * np.asarray(u)
        return Perturbation(zero, zero, antiderivative=zero, family="none")

    def primitive(self, r, u):
        """G(r,u) = int_0^u g(r,s) ds, Gauss-Legendre fallback when no closed form."""
        if self.antiderivative is not None:
            return self.antiderivative(r, u)
        nodes, weights = np.polynomial.legendre.leggauss(24)
        u = np.asarray(u, dtype=float)
        r = np.broadcast_to(np.asarray(r, dtype=float), u.shape)
        s = 0.5 * u[..., None] * (nodes + 1.0)
        vals = self.fn(np.broadcast_to(r[..., None], s.shape), s)
        return 0.5 * u * np.sum(weights * vals, axis=-1)


@dataclass(frozen=True)
class RadialProblem:
    """Immutable description of one radial Dirichlet problem on the ball B_R."""

    dimension: int
    exponent: float
    radius: float
    weight: Weight = field(default_factory=Weight.constant)
    perturbation: Perturbation = field(default_factory=Perturbation.none)
    label: str = ""

    def __post_init__(self):
        if self.dimension < 2:
            raise ValidationError(f"dimension must be >= 2, got {self.dimension}")
        two_star = sobolev_exponent(self.dimension)
        if not (2.0 < float(self.exponent) < two_star):
            raise ValidationError(
                f"exponent p={self.exponent} outside (2, {two_star}) for N={self.dimension}"
            )
        if not (self.radius > 0):
            raise ValidationError(f"radius must be positive, got {self.radius}")
        if not (float(self.weight.fn(0.0)) > 0):
            raise ValidationError("weight must satisfy d(0) > 0")

    @property
    def regime(self) -> Regime:
        return classify_regime(self.dimension, self.exponent)

    @property
    def d0(self) -> float:
        return float(self.weight.fn(0.0))

    @property
    def is_pure_power(self) -> bool:
        return self.weight.family == "constant" and self.perturbation.family == "none"

    # nonlinearity f(r,u) = d(r)|u|^(p-2)u + g(r,u); the power is evaluated as
    # sign(u)|u|^(p-1) so non-integer p is safe for u of either sign
    def f(self, r, u):
        u = np.asarray(u, dtype=float)
        p = self.exponent
        return self.weight.fn(r) * np.sign(u) * np.abs(u) ** (p - 1.0) + self.perturbation.fn(r, u)

    def f_u(self, r, u):
        u = np.asarray(u, dtype=float)
        p = self.exponent
        return self.weight.fn(r) * (p - 1.0) * np.abs(u) ** (p - 2.0) + self.perturbation.du(r, u)

    def F(self, r, u):
        """Primitive F(r,u) = d(r)|u|^p / p + G(r,u)."""
        u = np.asarray(u, dtype=float)
        p = self.exponent
        return self.weight.fn(r) * np.abs(u) ** p / p + self.perturbation.primitive(r, u)


@dataclass(frozen=True)
class ProbeGrid:
    """Sampling points for the advisory hypothesis checks."""

    r_points: tuple
    u_small: tuple = (1e-10, 1e-8, 1e-6)
    u_large: tuple = (1e4, 1e6, 1e8)
    u_moderate: tuple = (0.1, 1.0, 10.0)

    @staticmethod
    def default(radius: float, n: int = 64) -> "ProbeGrid":
        return ProbeGrid(tuple(np.linspace(0.0, radius, n)))


def _finite(x, point):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise EvaluationError(f"non-finite evaluation at {point}", point=point)
    return x


def validate_problem(problem: RadialProblem, probes: Optional[ProbeGrid] = None,
                     alpha: Optional[float] = None, beta: Optional[float] = None) -> ConditionReport:
    """Advisory, sampling-based check of the structural hypotheses on d and g.

    Verifies on the probe grid: d >= 0, d(0) > 0 and d nonincreasing; decay of
    g(r,u)/u^(p-1) at the large-u probes and of g(r,u)/u at the small-u probes;
    and the superlinearity sandwich (alpha-1) f u <= f_u u^2 <= (beta-1) f u.
    Failures are recorded with witness points, never raised.
    """
    if probes is None:
        probes = ProbeGrid.default(problem.radius)
    if not probes.r_points:
        raise ValidationError("probe grid is empty")
    alpha = problem.exponent if alpha is None else alpha
    beta = problem.exponent if beta is None else beta

    rep = ConditionReport(metadata={
        "alpha": alpha, "beta": beta, "n_r_probes": len(probes.r_points),
    })
    r = np.asarray(probes.r_points, dtype=float)
    d = _finite(problem.weight.fn(r), ("d", float(r[0])))

    # (i) weight positivity / monotonicity
    bad = r[d < 0]
    rep.add("weight_nonnegative", PASS if bad.size == 0 else FAIL, witnesses=bad[:5].tolist())
    rep.add("weight_positive_at_origin", PASS if problem.d0 > 0 else FAIL,
            values={"d0": problem.d0})
    incr = np.nonzero(np.diff(d) > 1e-13 * max(1.0, float(np.max(np.abs(d)))))[0]
    rep.add("weight_nonincreasing", PASS if incr.size == 0 else FAIL,
            witnesses=r[incr][:5].tolist())

    # (ii) smallness of g at the extreme probes
    p = problem.exponent
    large_bad, small_bad = [], []
    for rr in (0.0, float(r[-1])):
        for u in probes.u_large:
            ratio = abs(float(_finite(problem.perturbation.fn(rr, u), (rr, u)))) / u ** (p - 1.0)
            if ratio > 0.1:
                large_bad.append((rr, u, ratio))
        for u in probes.u_small:
            ratio = abs(float(_finite(problem.perturbation.fn(rr, u), (rr, u)))) / u
            if ratio > 0.1:
                small_bad.append((rr, u, ratio))
    rep.add("perturbation_decay_large_u", PASS if not large_bad else FAIL, witnesses=large_bad[:5])
    rep.add("perturbation_decay_small_u", PASS if not small_bad else FAIL, witnesses=small_bad[:5])

    # (iii) superlinearity sandwich at moderate probes
    sandwich_bad = []
    tol = 1e-10
    for rr in r[:: max(1, len(r) // 8)]:
        for u in probes.u_moderate:
            fu = float(_finite(problem.f(rr, u), (rr, u)))
            fuu = float(_finite(problem.f_u(rr, u), (rr, u)))
            lo, mid, hi = (alpha - 1.0) * fu * u, fuu * u * u, (beta - 1.0) * fu * u
            scale = max(abs(lo), abs(mid), abs(hi), 1e-300)
            if not (lo > 0 and lo <= mid * (1 + tol) + tol * scale and mid <= hi * (1 + tol) + tol * scale):
                sandwich_bad.append((float(rr), float(u)))
    rep.add("superlinearity_sandwich", PASS if not sandwich_bad else FAIL,
            witnesses=sandwich_bad[:5])
    return rep
