"""Command-line front end.

Every command reads a plain `key = value` config file, writes deterministic
artifacts (CSV, JSON with 17-significant-digit floats, gnuplot scripts) into
an output directory, and exits with a fixed taxonomy:

    0  success (all requested checks pass, or the command is report-only)
    1  configuration error
    2  numeric / domain error
    3  ambiguity (shooting could not isolate a unique branch)
    4  a requested check failed

Failures emit a machine-readable `{"error": {"kind": ..., "message": ...}}`
object on stdout.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import config as cfgmod
from .asymptotics import verify_limits
from .continuation import curve_extrema, mass_lookup, trace_mass_curve
from .errors import (AmbiguityError, ConfigError, DomainError,
                     EvaluationError, MassCurveError, NumericError,
                     ValidationError)
from .groundstate import (first_dirichlet_eigenvalue, q_mass_gradient_flow,
                          shoot_ground_state, solve_whole_space_Q)
from .radial_ode import profile_to_csv
from .report import FAIL
from .serialize import (curve_to_csv, json_dumps, region_to_csv, write_csv,
                        write_json, write_plot_script)
from .stability import classify_at_mass
from .yanagida import WeightSpec, check_conditions, region_table

EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_AMBIGUOUS = 3
EXIT_CHECK_FAILED = 4


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, (ConfigError, ValidationError)):
        return EXIT_CONFIG
    if isinstance(exc, AmbiguityError):
        return EXIT_AMBIGUOUS
    if isinstance(exc, (NumericError, EvaluationError, DomainError)):
        return EXIT_NUMERIC
    return EXIT_NUMERIC


def _error_json(exc: Exception) -> str:
    kind = getattr(exc, "kind", "internal")
    return json_dumps({"error": {"kind": kind, "message": str(exc)}})


def _outdir(args) -> str:
    out = args.output_dir
    os.makedirs(out, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out} is not writable")
    return out


def _artifact(cfg: dict, payload: dict) -> dict:
    """JSON artifact body: resolved config first, then the payload."""
    return {"config": dict(cfg), **payload}


def _trace_from_config(cfg, problem):
    lam1 = first_dirichlet_eigenvalue(problem.dimension, problem.radius)
    lam_min = cfgmod.get_float(cfg, "lambda.min", -lam1 + 1e-3)
    lam_max = cfgmod.get_float(cfg, "lambda.max")
    budget = cfgmod.get_int(cfg, "budget", 64)
    return trace_mass_curve(problem, lam_min, lam_max, budget=budget)


TRACE_KEYS = {"lambda.min", "lambda.max", "budget"}


def cmd_solve(cfg, args) -> int:
    cfgmod.check_keys(cfg, {"lambda"})
    problem = cfgmod.build_problem(cfg)
    lam = cfgmod.get_float(cfg, "lambda")
    out = _outdir(args)
    gs = shoot_ground_state(problem, lam)
    profile_to_csv(gs.profile, os.path.join(out, "groundstate.csv"),
                   lam=lam, a=gs.height)
    write_json(os.path.join(out, "groundstate.json"),
               _artifact(cfg, gs.to_scalars()))
    print(f"lambda={lam:.17g} a0={gs.height:.17g} mass={gs.mass:.17g} "
          f"energy={gs.energy:.17g} residual={gs.relative_residual:.3e}")
    return 0


def cmd_trace(cfg, args) -> int:
    cfgmod.check_keys(cfg, TRACE_KEYS)
    problem = cfgmod.build_problem(cfg)
    out = _outdir(args)
    curve = _trace_from_config(cfg, problem)
    ext = curve_extrema(curve)
    curve_to_csv(curve, os.path.join(out, "curve.csv"))
    write_json(os.path.join(out, "curve.json"), _artifact(cfg, {
        "samples": len(curve.samples),
        "lambda_range": list(curve.lam_range),
        "max_mass": ext.b,
        "argmax_lambda": ext.lam_star,
        "interior_max": ext.interior,
        "refinements": len(curve.refinement_log),
    }))
    write_plot_script(os.path.join(out, "curve.gp"), "curve.csv",
                      title="mass curve", xlabel="lambda", ylabel="mass")
    print(f"traced {len(curve.samples)} samples; max mass {ext.b:.17g} "
          f"at lambda={ext.lam_star:.17g}")
    return 0


def cmd_lookup(cfg, args) -> int:
    cfgmod.check_keys(cfg, TRACE_KEYS | {"mass"})
    problem = cfgmod.build_problem(cfg)
    c = cfgmod.get_float(cfg, "mass")
    out = _outdir(args)
    curve = _trace_from_config(cfg, problem)
    result = mass_lookup(problem, curve, c)
    payload = {
        "target_mass": c,
        "roots": [{"lambda": lam, **gs.to_scalars()} for lam, gs in result],
        "warnings": list(result.warnings),
    }
    if not len(result):
        payload["note"] = ("nonexistence: no normalized solution at this mass "
                           "within the traced range")
    write_json(os.path.join(out, "lookup.json"), _artifact(cfg, payload))
    print(f"mass={c:.17g}: {len(result)} root(s)")
    return 0


def cmd_qnorm(cfg, args) -> int:
    cfgmod.check_keys(cfg, {"flow.extent", "flow.n"})
    problem = cfgmod.build_problem(cfg)
    if not problem.is_pure_power or problem.d0 != 1.0:
        raise ConfigError("qnorm requires a pure power nonlinearity "
                          "(constant weight 1, no perturbation)")
    N, p = problem.dimension, problem.exponent
    out = _outdir(args)
    q = solve_whole_space_Q(N, p)
    extent = cfgmod.get_float(cfg, "flow.extent", 24.0)
    n = cfgmod.get_int(cfg, "flow.n", 6000)
    flow_lo = q_mass_gradient_flow(N, p, extent=extent, n=n)
    flow_hi = q_mass_gradient_flow(N, p, extent=extent, n=2 * n)
    uncertainty = max(abs(q.mass - flow_lo), abs(q.mass - flow_hi),
                      abs(flow_hi - flow_lo))
    profile_to_csv(q.profile, os.path.join(out, "qprofile.csv"), a=q.height)
    write_json(os.path.join(out, "qnorm.json"), _artifact(cfg, {
        **q.to_scalars(),
        "q_mass": q.mass,
        "flow_mass": flow_hi,
        "flow_mass_coarse": flow_lo,
        "uncertainty": uncertainty,
    }))
    print(f"q_mass={q.mass:.17g} +- {uncertainty:.3e} (dual-method)")
    if uncertainty > 1e-3 * q.mass:
        print("dual-method disagreement exceeds 0.1%")
        return EXIT_CHECK_FAILED
    return 0


def cmd_limits(cfg, args) -> int:
    cfgmod.check_keys(cfg, TRACE_KEYS)
    problem = cfgmod.build_problem(cfg)
    out = _outdir(args)
    curve = _trace_from_config(cfg, problem)
    q = solve_whole_space_Q(problem.dimension, problem.exponent)
    report = verify_limits(problem, curve, q)
    curve_to_csv(curve, os.path.join(out, "curve.csv"))
    write_json(os.path.join(out, "limits.json"), _artifact(cfg, report.to_dict()))
    write_plot_script(os.path.join(out, "limits.gp"), "curve.csv",
                      title="mass curve tail", xlabel="lambda", ylabel="mass",
                      logx=True, logy=True)
    for check in report.checks:
        print(f"{check.name}: {check.verdict}")
    return EXIT_CHECK_FAILED if report.any_fail else 0


def cmd_yanagida(cfg, args) -> int:
    cfgmod.check_keys(cfg, {"yanagida.mode", "yanagida.divisor", "yanagida.grid",
                            "yanagida.p_values", "yanagida.k_values",
                            "yanagida.s_values"})
    mode = cfgmod.get_choice(cfg, "yanagida.mode", {"check", "table"}, "check")
    divisor = cfgmod.get_choice(cfg, "yanagida.divisor", {"p", "p-1", "p+1"}, "p")
    grid = cfgmod.get_int(cfg, "yanagida.grid", 400)
    N = cfgmod.get_int(cfg, "dimension")
    R = cfgmod.get_float(cfg, "radius", 1.0)
    out = _outdir(args)

    if mode == "check":
        p = cfgmod.get_float(cfg, "exponent")
        family = cfgmod.get_choice(cfg, "weight.family",
                                   {"constant", "inverse_power"}, "constant")
        if family == "constant":
            w = WeightSpec.constant(cfgmod.get_float(cfg, "weight.value", 1.0), R)
        else:
            w = WeightSpec.inverse_power(cfgmod.get_float(cfg, "weight.k"),
                                         cfgmod.get_float(cfg, "weight.s"), R)
        report = check_conditions(w, p, N, grid=grid, divisor=divisor)
        write_json(os.path.join(out, "yanagida.json"),
                   _artifact(cfg, report.to_dict()))
        for check in report.checks:
            print(f"{check.name}: {check.verdict}")
        return EXIT_CHECK_FAILED if report.any_fail else 0

    table = region_table(N,
                         cfgmod.get_floats(cfg, "yanagida.p_values"),
                         cfgmod.get_floats(cfg, "yanagida.k_values"),
                         cfgmod.get_floats(cfg, "yanagida.s_values"),
                         grid=grid, divisor=divisor)
    region_to_csv(table, os.path.join(out, "region.csv"))
    write_json(os.path.join(out, "yanagida.json"), _artifact(cfg, {
        "dimension": N,
        "divisor": divisor,
        "rows": len(table.rows),
        "note": "conditions are sufficient, not necessary; out-of-region "
                "passes are expected",
        "discrepancies": [
            {"p": r.p, "k": r.k, "s": r.s, "overall": r.overall}
            for r in table.discrepancies
        ],
    }))
    print(f"{len(table.rows)} rows, {len(table.discrepancies)} in-region discrepancies")
    return 0


def cmd_stability(cfg, args) -> int:
    cfgmod.check_keys(cfg, TRACE_KEYS | {"mass"})
    problem = cfgmod.build_problem(cfg)
    c = cfgmod.get_float(cfg, "mass")
    out = _outdir(args)
    curve = _trace_from_config(cfg, problem)
    verdicts = classify_at_mass(problem, curve, c)
    write_json(os.path.join(out, "stability.json"), _artifact(cfg, {
        "target_mass": c,
        "verdicts": [v.to_scalars() for v in verdicts],
    }))
    for v in verdicts:
        print(f"lambda={v.lam:.17g} verdict={v.verdict} slope={v.slope:.6g}")
    if not verdicts:
        print("no normalized solution at this mass within the traced range")
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "trace": cmd_trace,
    "lookup": cmd_lookup,
    "qnorm": cmd_qnorm,
    "limits": cmd_limits,
    "yanagida": cmd_yanagida,
    "stability": cmd_stability,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="masscurve",
        description="Ground states, mass curves and stability for radial "
                    "semilinear problems on balls.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("config", help="key = value configuration file")
        cmd.add_argument("-o", "--output-dir", default=".",
                         help="artifact directory (default: current)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = cfgmod.load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except MassCurveError as exc:
        sys.stdout.write(_error_json(exc))
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
