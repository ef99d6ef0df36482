"""Cell-centered finite-difference discretization of the radial operator.

Nodes sit at r_i = (i+1/2)h with flux faces at j*h; the face at r=0 carries
zero flux (regularity), the face at r=R a Dirichlet condition.  The operator
-u'' - (N-1)/r u' + V(r) u is self-adjoint under the weight r^(N-1), and the
symmetrized tridiagonal form is exposed for eigensolves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .radial_ode import unit_sphere_area


@dataclass(frozen=True)
class RadialGrid:
    dimension: int
    r_end: float
    n: int

    @property
    def h(self) -> float:
        return self.r_end / self.n

    @property
    def nodes(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.h

    @property
    def faces(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.h

    @property
    def node_weight(self) -> np.ndarray:
        """Quadrature weight r^(N-1) * h per node (midpoint rule)."""
        return self.nodes ** (self.dimension - 1) * self.h

    def integral(self, values: np.ndarray) -> float:
        """omega_{N-1} * int values(r) r^(N-1) dr via the midpoint rule."""
        return unit_sphere_area(self.dimension) * float(np.dot(self.node_weight, values))


def laplacian_coefficients(grid: RadialGrid):
    """Tridiagonal bands (lower, diag, upper) of -Laplacian in flux form."""
    N, h, n = grid.dimension, grid.h, grid.n
    Rf = grid.faces ** (N - 1)
    w = grid.nodes ** (N - 1)
    diag = (Rf[1:] + Rf[:-1]) / (w * h * h)
    diag[-1] = (2.0 * Rf[-1] + Rf[-2]) / (w[-1] * h * h)  # Dirichlet half-cell
    off = -Rf[1:-1] / (h * h * np.sqrt(w[:-1] * w[1:]))
    lower = off * np.sqrt(w[:-1] / w[1:])   # A[i+1, i]
    upper = off * np.sqrt(w[1:] / w[:-1])   # A[i, i+1]
    return lower, diag, upper


def apply_operator(grid: RadialGrid, V: np.ndarray, u: np.ndarray) -> np.ndarray:
    lower, diag, upper = laplacian_coefficients(grid)
    out = (diag + V) * u
    out[:-1] += upper * u[1:]
    out[1:] += lower * u[:-1]
    return out


def solve_tridiagonal(grid: RadialGrid, V: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (-Laplacian + V) u = rhs with the grid's boundary conditions."""
    lower, diag, upper = laplacian_coefficients(grid)
    ab = np.zeros((3, grid.n))
    ab[0, 1:] = upper
    ab[1] = diag + V
    ab[2, :-1] = lower
    return solve_banded((1, 1), ab, rhs)


def symmetric_tridiagonal(grid: RadialGrid, V: np.ndarray):
    """Symmetrized bands (diag, offdiag) of -Laplacian + V under weight r^(N-1)."""
    lower, diag, upper = laplacian_coefficients(grid)
    return diag + V, -np.sqrt(lower * upper)
