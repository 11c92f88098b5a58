"""
Error hierarchy shared by every estimator, bound and simulation module.
Each class carries the CLI exit code it maps to.
"""

from enum import Enum
from typing import Optional


class Condition(str, Enum):
    """Named feasibility conditions reported by InfeasibleError."""
    KNOWN_VARIANCE_SAMPLE_SIZE = "known-variance sample size"
    EPS_FREE_SAMPLE_SIZE = "epsilon-free sample size"
    ALPHA_RANGE = "alpha range"
    ADAPTIVE_SAMPLE_SIZE = "adaptive sample size"
    TIGHT_DISCRIMINANT = "tight xi discriminant"
    TIGHT_BLOCK_COUNT = "tight block count"
    SIMPLE_CONFIDENCE = "simple confidence range"
    OPTIMAL_BLOCK_CONFIDENCE = "optimal-block confidence range"
    XI_BELOW_DELTA = "xi below delta"
    VARIANCE_ROOT = "variance criterion root"
    VARIANCE_UNCERTAINTY = "variance uncertainty"
    ETA_BELOW_ONE = "eta below one"


class EstimationError(Exception):
    """Base class for all library errors."""
    exit_code = 5


class ParameterError(EstimationError, ValueError):
    """An argument is outside the range the operation accepts."""
    exit_code = 2


class DomainError(ParameterError):
    """A numeric input lies outside the mathematical domain of a function."""


class InfeasibleError(EstimationError):
    """A named feasibility condition does not hold for the requested parameters."""
    exit_code = 3

    def __init__(
        self,
        condition: Condition,
        detail: str = "",
        minimal_n: Optional[int] = None
    ):
        self.condition = condition
        self.detail = detail
        self.minimal_n = minimal_n
        message = f"infeasible: {condition.value} condition violated"
        if detail:
            message += f" ({detail})"
        if minimal_n is not None:
            message += f"; requires n >= {minimal_n}"
        super().__init__(message)


class DegenerateDataError(EstimationError):
    """The sample carries no usable spread (constant data, too few points)."""
    exit_code = 4


class NumericalError(EstimationError):
    """An iterative method failed to converge or to bracket a root."""
    exit_code = 5


class ReplicationError(EstimationError):
    """An estimator failed inside one Monte Carlo replication."""

    def __init__(self, replication: int, cause: EstimationError):
        self.replication = replication
        self.cause = cause
        self.exit_code = cause.exit_code
        super().__init__(f"replication {replication}: {cause}")
