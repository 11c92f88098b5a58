"""
Worst-case lower bounds: for each bound some law with the given moments
makes the empirical mean deviate at least this much with probability 2 epsilon.
"""

import math

from src.core.errors import DomainError
from .query import BoundQuery


def lower_bound_plain(q: BoundQuery) -> float:
    """
    sqrt(v/(2 n eps)) (1 - 2 e eps / n)^((n-1)/2), reached by the three-point law.

    Raises:
        DomainError: if eps > 1/(2e)
    """
    if q.epsilon > 1.0 / (2.0 * math.e):
        raise DomainError(f"epsilon={q.epsilon:g} exceeds 1/(2e)")
    shrink = math.exp(0.5 * (q.n - 1) * math.log1p(-2.0 * math.e * q.epsilon / q.n))
    return math.sqrt(q.v / (2.0 * q.n * q.epsilon)) * shrink


def lower_bound_kurtosis(q: BoundQuery) -> float:
    """
    max(A, B) for laws with kurtosis kappa, reached by the four-point law.

    A = ((kappa-1)(1 - 8 eps)/(4 n eps))^(1/4) sqrt(v/n)
    B = ((kappa-1)/(2 n eps) (1 - (n eps/16)^(1/4) - 4 eps))^(1/4) sqrt(v/n)
        - sqrt(log(16/(n eps)) v / (2n))
    A term whose inner factor is negative drops out.

    Raises:
        DomainError: unless 1/eps >= n >= 16
    """
    kappa = q.require_kappa()
    n, epsilon, v = q.n, q.epsilon, q.v
    if n < 16 or n * epsilon > 1.0:
        raise DomainError(f"need 1/epsilon >= n >= 16, got n={n}, epsilon={epsilon:g}")
    scale = math.sqrt(v / n)
    terms = []

    inner_a = (kappa - 1.0) * (1.0 - 8.0 * epsilon) / (4.0 * n * epsilon)
    if inner_a >= 0.0:
        terms.append(inner_a ** 0.25 * scale)

    inner_b = (kappa - 1.0) / (2.0 * n * epsilon) * (1.0 - (n * epsilon / 16.0) ** 0.25 - 4.0 * epsilon)
    if inner_b >= 0.0:
        terms.append(inner_b ** 0.25 * scale - math.sqrt(math.log(16.0 / (n * epsilon)) * v / (2.0 * n)))

    return max(terms) if terms else -math.inf
