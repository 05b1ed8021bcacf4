"""
Exception hierarchy. Each error carries the process exit code the CLI returns for it.
"""


class IdemetricError(ValueError):
    """Base class for all domain errors."""

    exit_code: int = 1


class ParseError(IdemetricError):
    """Malformed input file or field."""

    exit_code = 2


class UnknownPointError(ParseError):
    """A point id that is not registered in the ground space."""

    def __init__(self, point: str, where: str = "space"):
        super().__init__(f"Unknown point '{point}' in {where}")
        self.point = point


class SupportLimitError(IdemetricError):
    """Exhaustive search requested on an instance above the oracle guard."""

    exit_code = 2


class MetricValidationError(IdemetricError):
    """Distance data violating the metric axioms."""

    exit_code = 3

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NormalizationError(IdemetricError):
    """Atom list that does not form an idempotent probability measure."""

    exit_code = 4


class SpaceMismatchError(IdemetricError):
    """Operands live on different ground spaces."""

    exit_code = 5


class OracleMismatchError(IdemetricError):
    """Closed-form solver disagrees with the exhaustive oracle."""

    exit_code = 6


class MarginalError(IdemetricError):
    """A constructed coupling failed its marginal checks."""

    exit_code = 6


class InvalidArgumentError(IdemetricError):
    """Argument outside the operation's domain (e.g. nonpositive h)."""

    exit_code = 2
