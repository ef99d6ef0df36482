"""Ground states, mass curves and stability for radial semilinear problems.

Computes positive radial ground states of -Delta u + lam u = d(r)|u|^(p-2)u
on balls by shooting, traces the mass curve lam -> |u_lam|^2, compares the
large-lam rescaling against the whole-space soliton Q, evaluates sufficient
uniqueness conditions for weighted power nonlinearities, and classifies
orbital stability by the slope criterion.
"""

from .asymptotics import (RescaledState, compare_to_Q, equation_residual,
                          rescale, rescaled_energy, verify_limits)
from .continuation import (CurveExtrema, CurveSample, LookupResult, MassCurve,
                           curve_extrema, mass_lookup, trace_mass_curve)
from .errors import (AmbiguityError, ConfigError, DomainError,
                     EvaluationError, MassCurveError, NumericError,
                     ValidationError)
from .groundstate import (GroundState, QProfile, SolverSettings, energy,
                          first_dirichlet_eigenvalue, gradient_norm_sq, mass,
                          nehari_residual, q_mass_gradient_flow,
                          shoot_ground_state, solve_whole_space_Q)
from .problem import (Perturbation, RadialProblem, Regime, Weight,
                      classify_regime, sobolev_exponent, validate_problem)
from .radial_ode import (EventKind, IntegratorSettings, RadialProfile,
                         TerminalEvent, h1_distance, integrate,
                         unit_sphere_area)
from .report import FAIL, INDETERMINATE, PASS, CheckResult, ConditionReport
from .stability import (StabilityVerdict, classify_at_mass,
                        linearized_spectrum, mass_slope, nondegeneracy_gap)
from .yanagida import (WeightSpec, H_function, check_conditions,
                       region_table, sufficient_region)

__version__ = "0.1.0"
