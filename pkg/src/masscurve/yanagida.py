"""Sufficient uniqueness conditions for -Delta u + lam u = h(r) u^(p-1) on a ball.

Uniqueness of the positive radial solution follows from sign conditions on

    H(r; m) = 2 r^(m+2) h'(r) / p  -  {2N - 4 - m - 2(m+2)/p} r^(m+1) h(r)

for m in [0, N-2]: H(.;0) <= 0 on (0,R) and, for each m in (0, N-2], the
sign pattern of H(.;m) is (+ then -) with a single change point beta(m).
These are sufficient, not necessary; the checker evaluates them on grids and
never claims non-uniqueness on failure.

The divisor written as p above is typographically ambiguous in the source
material, so it is configurable among {p, p-1, p+1} and defaults to the
literal p.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ValidationError
from .report import FAIL, INDETERMINATE, PASS, ConditionReport
from .continuation import worker_count

#: admissible divisor variants for the /p factor in H(r;m)
DIVISOR_CHOICES = ("p", "p-1", "p+1")

#: |H| below this times max(1, sup|H|) counts as an analytic zero
ZERO_TOL = 1e-12


def _resolve_divisor(p: float, divisor: str) -> float:
    if divisor == "p":
        return p
    if divisor == "p-1":
        return p - 1.0
    if divisor == "p+1":
        return p + 1.0
    raise ValidationError(f"divisor must be one of {DIVISOR_CHOICES}, got {divisor!r}")


@dataclass(frozen=True)
class WeightSpec:
    """Radial weight h with derivative, tagged by family for reporting."""

    h: Callable[[np.ndarray], np.ndarray]
    h_r: Callable[[np.ndarray], np.ndarray]
    family: str                    # "constant" | "inverse_power" | "custom"
    radius: float
    k: Optional[float] = None      # inverse-power parameters, if applicable
    s: Optional[float] = None

    def __post_init__(self):
        if self.radius <= 0:
            raise ValidationError("radius must be positive")
        if self.family == "inverse_power":
            if self.k is None or self.s is None:
                raise ValidationError("inverse-power weight needs k and s")
            if self.k < 0 or self.s <= 1:
                raise ValidationError("inverse-power weight needs k >= 0, s > 1")
            if abs(float(self.h(np.array(0.0))) - 1.0) > 1e-14:
                raise ValidationError("inverse-power weight must have h(0) = 1")

    @staticmethod
    def constant(value: float = 1.0, radius: float = 1.0) -> "WeightSpec":
        return WeightSpec(lambda r: np.full_like(np.asarray(r, dtype=float), value),
                          lambda r: np.zeros_like(np.asarray(r, dtype=float)),
                          "constant", radius)

    @staticmethod
    def inverse_power(k: float, s: float, radius: float = 1.0) -> "WeightSpec":
        """h(r) = (1 + r^k)^(-s)."""
        def h(r):
            r = np.asarray(r, dtype=float)
            return (1.0 + r ** k) ** (-s)

        def h_r(r):
            r = np.asarray(r, dtype=float)
            if k == 0:
                return np.zeros_like(r)
            return -s * k * r ** (k - 1.0) * (1.0 + r ** k) ** (-s - 1.0)

        return WeightSpec(h, h_r, "inverse_power", radius, k=k, s=s)


def H_function(w: WeightSpec, p: float, N: int, m: float, r,
               divisor: str = "p"):
    """Evaluate H(r;m) with n = N; vectorized over r."""
    if not (0.0 <= m <= N - 2.0):
        raise DomainError(f"m must lie in [0, N-2] = [0, {N - 2}], got {m}")
    d = _resolve_divisor(p, divisor)
    r = np.asarray(r, dtype=float)
    coef = 2.0 * N - 4.0 - m - 2.0 * (m + 2.0) / d
    return (2.0 * r ** (m + 2.0) * w.h_r(r) / d
            - coef * r ** (m + 1.0) * w.h(r))


def _sign_pattern(H: np.ndarray, r: np.ndarray, R: float, tol: float):
    """Classify the sign pattern of H: single (+ then -) change, or not.

    Returns (verdict, beta, witnesses): all-one-sign counts as pass with the
    change point pushed to an endpoint; entries with |H| < tol are treated as
    zeros and absorbed into either side.
    """
    if np.all(np.abs(H) < tol):
        return INDETERMINATE, None, []
    sign = np.where(np.abs(H) < tol, 0, np.sign(H)).astype(int)
    nz = sign[sign != 0]
    # collapse consecutive repeats to the sequence of sign blocks
    blocks = nz[np.concatenate([[True], nz[1:] != nz[:-1]])] if nz.size else np.array([])
    if blocks.size == 1:
        beta = R if blocks[0] > 0 else 0.0
        return PASS, beta, []
    if blocks.size == 2 and blocks[0] > 0 and blocks[1] < 0:
        idx = np.nonzero(sign < 0)[0]
        first_neg = int(idx[0])
        last_pos = np.nonzero(sign[:first_neg] > 0)[0]
        lo = r[int(last_pos[-1])] if last_pos.size else 0.0
        return PASS, 0.5 * (lo + r[first_neg]), []
    # anything else: report the r values where the pattern breaks
    changes = np.nonzero(np.diff(np.sign(nz)))[0] if nz.size else np.array([])
    pos = np.nonzero(sign != 0)[0]
    witnesses = [float(r[pos[i + 1]]) for i in changes][:8]
    return FAIL, None, witnesses


def check_conditions(w: WeightSpec, p: float, N: int, grid: int = 400,
                     divisor: str = "p") -> ConditionReport:
    """Evaluate the uniqueness conditions (C1)-(C4) on r and m grids.

    (C1) h >= 0 everywhere, > 0 somewhere; (C2) H(r;0) <= 0 on (0,R);
    (C3) for every m in (0, N-2] the pattern of H(.;m) is (+ then -) with one
    change point (vacuous for N = 2); (C4) h bounded with h(0) > 0.
    """
    if grid < 100:
        raise ValidationError("grid must have at least 100 points")
    R = w.radius
    r = np.linspace(0.0, R, grid + 1)[1:]  # open at 0, closed at R
    hv = w.h(r)
    h0 = float(w.h(np.array(0.0)))

    rep = ConditionReport(metadata={
        "family": w.family, "p": p, "N": N, "radius": R,
        "grid": grid, "divisor": divisor,
        **({"k": w.k, "s": w.s} if w.family == "inverse_power" else {}),
    })

    bad = r[hv < 0]
    rep.add("C1", FAIL if bad.size else (PASS if np.any(hv > 0) else FAIL),
            witnesses=[float(x) for x in bad[:8]],
            detail="h >= 0 on (0,R) and positive somewhere")

    H0 = np.asarray(H_function(w, p, N, 0.0, r, divisor))
    tol0 = ZERO_TOL * max(1.0, float(np.max(np.abs(H0))))
    if np.all(np.abs(H0) < tol0):
        rep.add("C2", INDETERMINATE, detail="|H(r;0)| below tolerance throughout")
    else:
        bad = r[H0 > tol0]
        rep.add("C2", FAIL if bad.size else PASS,
                witnesses=[float(x) for x in bad[:8]],
                detail="H(r;0) <= 0 on (0,R)",
                values={"max_H0": float(np.max(H0))})

    if N <= 2:
        rep.add("C3", PASS, detail="vacuous: the m-range (0, N-2] is empty")
    else:
        m_grid = np.linspace(0.0, N - 2.0, max(grid // 8, 16) + 1)[1:]
        verdict, betas, witnesses, bad_m = PASS, {}, [], None
        zero_count = 0
        for m in m_grid:
            Hm = np.asarray(H_function(w, p, N, float(m), r, divisor))
            tol = ZERO_TOL * max(1.0, float(np.max(np.abs(Hm))))
            v, beta, wit = _sign_pattern(Hm, r, R, tol)
            if v == PASS:
                betas[float(m)] = beta
            elif v == INDETERMINATE:
                # H(.;m) vanishes identically: the pattern holds with any beta
                zero_count += 1
                betas[float(m)] = R
            elif v == FAIL:
                verdict, witnesses, bad_m = FAIL, wit, float(m)
                break
        if verdict == PASS and zero_count == len(m_grid):
            verdict = INDETERMINATE
        rep.add("C3", verdict, witnesses=witnesses,
                detail="single (+ then -) sign change of H(.;m) for each m in (0,N-2]",
                values={"m_samples": len(m_grid),
                        **({"failing_m": bad_m} if bad_m is not None else {}),
                        **({"beta_at_m_max": betas.get(float(m_grid[-1]))} if betas else {})})

    rep.add("C4", PASS if (h0 > 0 and np.all(np.isfinite(hv))) else FAIL,
            detail="h(0) > 0 and h bounded on [0,R)",
            values={"h0": h0, "sup_h": float(np.max(hv))})
    rep.metadata["note"] = ("conditions are sufficient for uniqueness, "
                            "not necessary; a fail does not imply multiplicity")
    return rep


def sufficient_region(N: int, p: float, k: float, s: float) -> bool:
    """Known sufficient parameter region for the family (1+r^k)^(-s)."""
    if N == 3:
        return 2.0 < p <= 4.0 and k * s <= 4.0 - p
    if N == 2:
        return 2.0 < p <= 6.0 and 2.0 * k * s <= 6.0 - p
    raise ValidationError("region tables are stated for N in {2, 3} only")


@dataclass(frozen=True)
class RegionRow:
    p: float
    k: float
    s: float
    in_region: bool
    c1: str
    c2: str
    c3: str
    overall: str


@dataclass
class RegionTable:
    dimension: int
    divisor: str
    rows: list = field(default_factory=list)

    @property
    def discrepancies(self) -> list:
        """In-region points whose grid verdict is not a clean pass."""
        return [row for row in self.rows if row.in_region and row.overall != PASS]


def region_table(N: int, p_values, k_values, s_values, grid: int = 400,
                 divisor: str = "p", radius: float = 1.0) -> RegionTable:
    """Sweep the (p, k, s) grid and compare verdicts to the sufficient region.

    Rows are emitted in deterministic (p, k, s) lexicographic order even when
    the sweep runs on several workers.  Out-of-region passes are expected
    (the conditions are only sufficient) and are not listed as discrepancies.
    """
    combos = [(float(p), float(k), float(s))
              for p in p_values for k in k_values for s in s_values]

    def run(combo):
        p, k, s = combo
        w = (WeightSpec.constant(1.0, radius) if k == 0
             else WeightSpec.inverse_power(k, s, radius))
        rep = check_conditions(w, p, N, grid=grid, divisor=divisor)
        overall = PASS if all(rep[c].verdict == PASS for c in ("C1", "C2", "C3")) else (
            FAIL if any(rep[c].verdict == FAIL for c in ("C1", "C2", "C3"))
            else INDETERMINATE)
        return RegionRow(p, k, s, sufficient_region(N, p, k, s),
                         rep["C1"].verdict, rep["C2"].verdict,
                         rep["C3"].verdict, overall)

    workers = min(worker_count(), max(len(combos), 1))
    if workers > 1 and len(combos) > 4:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, combos))
    else:
        rows = [run(c) for c in combos]
    return RegionTable(N, divisor, rows)
