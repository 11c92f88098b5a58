"""
Argument checks shared by the estimator and bound modules.
"""

import math

from .errors import DomainError, ParameterError


def check_finite(x: float, name: str = "x") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


def check_positive(x: float, name: str) -> float:
    x = check_finite(x, name)
    if x <= 0.0:
        raise ParameterError(f"{name} must be > 0, got {x:g}")
    return x


def check_epsilon(epsilon: float, name: str = "epsilon", upper: float = 0.5) -> float:
    """Confidence level in (0, upper]."""
    epsilon = check_finite(epsilon, name)
    if not 0.0 < epsilon <= upper:
        raise ParameterError(f"{name} must lie in (0, {upper:g}], got {epsilon:g}")
    return epsilon


def check_count(n: int, name: str = "n", minimum: int = 1) -> int:
    try:
        whole = int(n)
    except (TypeError, ValueError, OverflowError):
        raise ParameterError(f"{name} must be an integer, got {n!r}") from None
    if isinstance(n, bool) or whole != n:
        raise ParameterError(f"{name} must be an integer, got {n!r}")
    if whole < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {whole}")
    return whole
