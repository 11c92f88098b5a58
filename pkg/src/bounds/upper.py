"""
Deviation bounds for the empirical mean and the Gaussian benchmark.

Every function returns a halfwidth eta such that |M - m| <= eta with
probability at least 1 - 2 epsilon, for any law with variance v (and
kurtosis at most kappa where used).
"""

import math
from enum import Enum

from scipy.optimize import minimize_scalar
from scipy.special import ndtri
from scipy.stats import chi2

from src.core.errors import NumericalError, ParameterError
from src.core.validation import check_count, check_epsilon, check_finite
from .query import BoundQuery

# Fallback when the default lambda rule has a non-positive log argument
LAMBDA_FLOOR = 1e-6
_SILVER4 = (1.0 + math.sqrt(2.0)) ** 4


class LambdaRule(str, Enum):
    """How the confidence split of the kurtosis bound is chosen."""
    DEFAULT = "default"
    EXACT = "exact"


def chebyshev_halfwidth(q: BoundQuery) -> float:
    """sqrt(v / (2 epsilon n))."""
    return math.sqrt(q.v / (2.0 * q.epsilon * q.n))


def default_lambda(n: int, kappa: float, epsilon: float) -> float:
    """min(1/2, 2^(7/4) (n eps / kappa)^(1/4) sqrt(log(kappa / (2 n eps^5))))."""
    log_term = math.log(kappa) - math.log(2.0 * n) - 5.0 * math.log(epsilon)
    if log_term <= 0.0:
        return LAMBDA_FLOOR
    return min(0.5, 2.0 ** 1.75 * (n * epsilon / kappa) ** 0.25 * math.sqrt(log_term))


def _kurtosis_unit(n: int, kappa: float, epsilon: float, lam: float) -> float:
    """Kurtosis bound divided by sqrt(v), for a given lambda."""
    log_term = math.log(1.0 / (lam * epsilon))
    gaussian = math.sqrt(2.0 * log_term / n)
    bernstein = math.sqrt(kappa) * log_term / (3.0 * n)
    tail = (kappa / (2.0 * (1.0 - lam) * n ** 3 * epsilon)) ** 0.25
    correction = (
        1.0 + 3.0 * (n - 1) * kappa * log_term ** 2 / (64.0 * _SILVER4 * n * n)
    ) ** 0.25
    return gaussian + bernstein + tail * correction


def optimal_lambda(n: int, kappa: float, epsilon: float) -> float:
    """lambda in (0, 1) minimizing the kurtosis bound."""
    result = minimize_scalar(
        lambda lam: _kurtosis_unit(n, kappa, epsilon, lam),
        bounds=(1e-12, 1.0 - 1e-12),
        method="bounded",
        options={"xatol": 1e-10},
    )
    if not result.success:
        raise NumericalError(f"lambda minimization failed: {result.message}")
    return float(result.x)


def kurtosis_halfwidth(q: BoundQuery, rule: LambdaRule = LambdaRule.DEFAULT) -> float:
    """
    Bound for laws with kurtosis at most kappa.

    sqrt(v) [sqrt(2L/n) + sqrt(kappa) L/(3n)
             + (kappa/(2(1-lambda) n^3 eps))^(1/4) (1 + 3(n-1) kappa L^2/(4^3 (1+sqrt 2)^4 n^2))^(1/4)]
    with L = log(1/(lambda eps)). An explicit q.lambda_ takes precedence over the rule.
    """
    kappa = q.require_kappa()
    if q.lambda_ is not None:
        lam = q.lambda_
    elif LambdaRule(rule) is LambdaRule.EXACT:
        lam = optimal_lambda(q.n, kappa, q.epsilon)
    else:
        lam = default_lambda(q.n, kappa, q.epsilon)
    if not 0.0 < lam < 1.0:
        raise ParameterError(f"lambda must lie in (0, 1), got {lam!r}")
    return math.sqrt(q.v) * _kurtosis_unit(q.n, kappa, q.epsilon, lam)


def fourth_moment_halfwidth(q: BoundQuery) -> float:
    """((3(n-1) + kappa) / (2 n eps))^(1/4) sqrt(v/n)."""
    kappa = q.require_kappa()
    return ((3.0 * (q.n - 1) + kappa) / (2.0 * q.n * q.epsilon)) ** 0.25 * math.sqrt(q.v / q.n)


def empirical_mean_best_halfwidth(q: BoundQuery) -> float:
    """Smallest of the Chebyshev, kurtosis and fourth-moment bounds (the latter two need kappa)."""
    candidates = [chebyshev_halfwidth(q)]
    if q.kappa is not None:
        candidates.append(kurtosis_halfwidth(q))
        candidates.append(fourth_moment_halfwidth(q))
    return min(candidates)


def gaussian_halfwidth(q: BoundQuery) -> float:
    """sqrt(v/n) Phi^-1(1 - eps): no estimator does better on Gaussian samples."""
    return math.sqrt(q.v / q.n) * (0.0 - float(ndtri(q.epsilon)))


def second_moment_upper(n: int, kappa: float, epsilon: float) -> float:
    """
    Chebyshev bound on E(Y^2) / M_2 for the known-mean second moment M_2.

    1 / (1 - sqrt((kappa - 1) / (2 n eps))); +inf from eps = (kappa - 1)/(2n) downwards.
    """
    n = check_count(n)
    kappa = check_finite(kappa, "kappa")
    epsilon = check_epsilon(epsilon)
    spread = math.sqrt(max(kappa - 1.0, 0.0) / (2.0 * n * epsilon))
    if spread >= 1.0:
        return math.inf
    return 1.0 / (1.0 - spread)


def variance_log_deviation_gaussian(n: int, epsilon: float) -> float:
    """
    zeta with |log V_hat - log v| <= zeta w.p. 1 - 2 eps for a Gaussian sample.

    (n-1) V_hat / v is chi-square with n - 1 degrees of freedom.
    """
    n = check_count(n, minimum=2)
    epsilon = check_epsilon(epsilon)
    dof = n - 1
    lower = float(chi2.ppf(epsilon, dof)) / dof
    upper = float(chi2.isf(epsilon, dof)) / dof
    return max(-math.log(lower), math.log(upper))
