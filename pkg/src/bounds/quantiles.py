"""
Normal and chi-square quantiles.
"""

import math

from scipy.special import ndtri
from scipy.stats import chi2

from src.core.errors import DomainError
from src.core.validation import check_count, check_finite


def _check_probability(p: float) -> float:
    p = check_finite(p, "p")
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    return p


def std_normal_quantile(p: float) -> float:
    """Inverse of the standard normal distribution function."""
    return float(ndtri(_check_probability(p)))


def chi_square_quantile(p: float, dof: int) -> float:
    """Quantile of the chi-square law with dof degrees of freedom."""
    p = _check_probability(p)
    dof = check_count(dof, "dof")
    value = float(chi2.ppf(p, dof))
    if not math.isfinite(value):
        raise DomainError(f"chi-square quantile undefined at p={p!r}, dof={dof}")
    return value
