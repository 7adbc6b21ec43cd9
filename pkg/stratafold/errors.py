"""
Exception hierarchy for stratafold.

Every error carries the process exit code the command-line driver
returns when the error escapes a sub-command.
"""

from typing import Optional


class StratafoldError(Exception):
    """Base class for all library errors."""

    exit_code = 2

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(StratafoldError):
    """Malformed configuration, flags or input documents."""

    exit_code = 2


class InvalidSpecError(ConfigError):
    """A structure-constant, metric or Lindblad definition failed validation."""


class DomainError(StratafoldError):
    """Arguments outside the domain of an operation."""

    exit_code = 2


class AlgebraMismatchError(DomainError):
    """Operands belong to different algebras, metrics or rings."""


class GradeMismatchError(DomainError):
    """Operands have incompatible grades or degrees."""


class DegenerateMetricError(DomainError):
    """The operation needs a nondegenerate metric."""


class OutsideDomainError(DomainError):
    """Expectation functions are undefined where the trace vanishes."""


class BoundaryPointError(DomainError):
    """A probability vector sits on a face of the simplex."""


class NumericalContractError(StratafoldError):
    """An integration left the tolerances it promises to keep."""

    exit_code = 3

    def __init__(self, detail: str, tau: Optional[float] = None, value: Optional[float] = None):
        super().__init__(detail)
        self.tau = tau
        self.value = value


class TraceDriftError(NumericalContractError):
    """Trace moved away from one by more than the tolerance."""


class PositivityViolation(NumericalContractError):
    """A state picked up an eigenvalue below the negative tolerance."""


class InvariantFailure(StratafoldError):
    """An invariant suite reported at least one failing check."""

    exit_code = 4
