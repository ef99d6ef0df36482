"""Plain-text key=value run configuration.

Grammar: one `key = value` pair per line, `#` starts a comment, blank lines
ignored.  Keys are dotted lowercase; unknown keys are an error rather than
silently ignored, so typos surface immediately.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigError
from .problem import Perturbation, RadialProblem, Weight

#: keys accepted by every command (the problem definition)
PROBLEM_KEYS = {
    "dimension", "exponent", "radius", "label",
    "weight.family", "weight.value", "weight.k", "weight.s",
    "perturbation.family",
}


def parse_kv(text: str) -> dict:
    """Parse `key = value` lines into an ordered dict of strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            return parse_kv(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")


def check_keys(cfg: dict, allowed: set) -> None:
    unknown = sorted(set(cfg) - allowed - PROBLEM_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")


def get_int(cfg: dict, key: str, default=None) -> int:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(cfg[key])
    except ValueError:
        raise ConfigError(f"key {key!r} must be an integer, got {cfg[key]!r}")


def get_float(cfg: dict, key: str, default=None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(Fraction(cfg[key]))  # accepts 5, 2.5 and 7/3
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"key {key!r} must be a number, got {cfg[key]!r}")


def get_floats(cfg: dict, key: str, default=None) -> list:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return list(default)
    try:
        return [float(Fraction(tok)) for tok in cfg[key].split(",") if tok.strip()]
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"key {key!r} must be a comma-separated number list")


def get_choice(cfg: dict, key: str, choices, default=None) -> str:
    val = cfg.get(key, default)
    if val is None:
        raise ConfigError(f"missing required key {key!r}")
    if val not in choices:
        raise ConfigError(f"key {key!r} must be one of {sorted(choices)}, got {val!r}")
    return val


def build_problem(cfg: dict) -> RadialProblem:
    """Assemble the radial problem from the shared configuration keys."""
    N = get_int(cfg, "dimension")
    p = get_float(cfg, "exponent")
    R = get_float(cfg, "radius", 1.0)
    family = get_choice(cfg, "weight.family", {"constant", "inverse_power"}, "constant")
    if family == "constant":
        weight = Weight.constant(get_float(cfg, "weight.value", 1.0))
    else:
        weight = Weight.inverse_power(get_float(cfg, "weight.k"),
                                      get_float(cfg, "weight.s"))
    get_choice(cfg, "perturbation.family", {"none"}, "none")
    try:
        return RadialProblem(N, p, R, weight, Perturbation.none(),
                             label=cfg.get("label", ""))
    except Exception as exc:
        raise ConfigError(f"invalid problem definition: {exc}")
