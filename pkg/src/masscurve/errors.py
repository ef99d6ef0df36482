"""Exception taxonomy shared by all solver modules.

The CLI maps these onto its exit codes: config -> 1, numeric -> 2,
ambiguity -> 3 (check failures use exit 4 but are not exceptions).
"""


class MassCurveError(Exception):
    """Base class for all package errors."""

    kind = "error"


class ConfigError(MassCurveError):
    """Malformed configuration: unknown keys, bad values, missing files."""

    kind = "config"


class ValidationError(MassCurveError):
    """A precondition on operation inputs is violated."""

    kind = "validation"


class DomainError(MassCurveError):
    """Input is outside the mathematical domain of the operation."""

    kind = "domain"

    def __init__(self, message, *, kind=None):
        super().__init__(message)
        if kind is not None:
            self.kind = kind


class EvaluationError(MassCurveError):
    """A user-supplied callback returned NaN or raised at a probe point."""

    kind = "evaluation"

    def __init__(self, message, *, point=None):
        super().__init__(message)
        self.point = point


class NumericError(MassCurveError):
    """A numerical procedure failed to converge or lost its bracket."""

    kind = "numeric"

    def __init__(self, message, *, last_radius=None):
        super().__init__(message)
        self.last_radius = last_radius


class AmbiguityError(MassCurveError):
    """Multiple shooting brackets found: the positive solution may be non-unique.

    Carries all candidate brackets so the caller can inspect them.
    """

    kind = "ambiguity"

    def __init__(self, message, *, brackets=()):
        super().__init__(message)
        self.brackets = list(brackets)
