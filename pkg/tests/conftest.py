"""Shared fixtures: the three benchmark problems and their traced curves.

Curve tracing is the expensive part of the suite, so traced curves (and their
wall-clock durations, needed by the runtime assertions) are session-scoped.
"""

import time

import pytest

from masscurve import (Perturbation, RadialProblem, Weight,
                       first_dirichlet_eigenvalue, solve_whole_space_Q,
                       trace_mass_curve)


def pure_power(N, p):
    return RadialProblem(N, p, 1.0, Weight.constant(1.0), Perturbation.none())


def _timed_trace(problem, lam_max=1e3, budget=64):
    lam1 = first_dirichlet_eigenvalue(problem.dimension, problem.radius)
    t0 = time.monotonic()
    curve = trace_mass_curve(problem, -lam1 + 1e-3, lam_max, budget=budget)
    return curve, time.monotonic() - t0


@pytest.fixture(scope="session")
def sc_problem():
    return pure_power(3, 4.0)       # supercritical: p = 4 > 2 + 4/3


@pytest.fixture(scope="session")
def sub_problem():
    return pure_power(3, 3.0)       # subcritical: p = 3 < 2 + 4/3


@pytest.fixture(scope="session")
def crit_problem():
    return pure_power(2, 4.0)       # mass-critical: p = 4 = 2 + 4/2


@pytest.fixture(scope="session")
def sc_traced(sc_problem):
    return _timed_trace(sc_problem)


@pytest.fixture(scope="session")
def sub_traced(sub_problem):
    return _timed_trace(sub_problem)


@pytest.fixture(scope="session")
def crit_traced(crit_problem):
    return _timed_trace(crit_problem)


@pytest.fixture(scope="session")
def sc_curve(sc_traced):
    return sc_traced[0]


@pytest.fixture(scope="session")
def sub_curve(sub_traced):
    return sub_traced[0]


@pytest.fixture(scope="session")
def crit_curve(crit_traced):
    return crit_traced[0]


@pytest.fixture(scope="session")
def q_2_4():
    return solve_whole_space_Q(2, 4.0)


@pytest.fixture(scope="session")
def q_3_4():
    return solve_whole_space_Q(3, 4.0)


@pytest.fixture(scope="session")
def q_3_3():
    return solve_whole_space_Q(3, 3.0)
