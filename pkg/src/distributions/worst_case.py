"""
Worst-case discrete laws behind the lower bounds on the empirical mean.

three_point_spec puts mass on {-n eta, 0, n eta} so that with probability
about v/(2 n eta^2) a single observation drags the mean to eta.
four_point_spec adds a symmetric inner pair {-xi, xi} to reach a prescribed
kurtosis as well.
"""

import logging
import math
import sys
from typing import Tuple

from scipy.optimize import brentq

from src.core.errors import NumericalError, ParameterError
from src.core.validation import check_count, check_epsilon, check_positive
from .specs import Atom, DiscreteSpec

logger = logging.getLogger(__name__)

_MAX_DOUBLINGS = 200


def three_point_spec(v: float, eta: float, n: int) -> DiscreteSpec:
    """
    Law on {-n eta, 0, n eta} with mean 0 and variance v.

    Raises:
        ParameterError: if v / (n eta)^2 > 1
    """
    v = check_positive(v, "v")
    eta = check_positive(eta, "eta")
    n = check_count(n)
    outer = v / (n * eta) ** 2
    if outer > 1.0:
        raise ParameterError(
            f"v/(n eta)^2 = {outer:.6g} > 1: outer atoms would need more than unit mass"
        )
    tail = 0.5 * outer
    return DiscreteSpec((
        Atom(-n * eta, tail),
        Atom(0.0, 1.0 - outer),
        Atom(n * eta, tail),
    ))


def kurtosis_map(q: float, x: float) -> float:
    """f_q(x) = (1 - 2q + 2q x^4) / (1 - 2q + 2q x^2)^2, increasing on [1, inf)."""
    base = 1.0 - 2.0 * q
    x2 = x * x
    return (base + 2.0 * q * x2 * x2) / (base + 2.0 * q * x2) ** 2


def _invert_kurtosis_map(q: float, kappa: float) -> float:
    hi = 2.0
    for _ in range(_MAX_DOUBLINGS):
        if kurtosis_map(q, hi) >= kappa:
            break
        hi *= 2.0
    else:
        raise NumericalError(f"could not bracket f_q(x) = {kappa:g} for q = {q:g}")
    try:
        return brentq(lambda x: kurtosis_map(q, x) - kappa, 1.0, hi, xtol=1e-15, rtol=4 * sys.float_info.epsilon)
    except (RuntimeError, ValueError) as e:
        raise NumericalError(f"inverting f_q failed: {e}") from e


def four_point_spec(v: float, kappa: float, q: float, n: int) -> DiscreteSpec:
    """
    Law with atoms +-n eta (mass q each) and +-xi (mass 1/2 - q each).

    x = n eta / xi solves f_q(x) = kappa, then xi = sqrt(v / (1 - 2q + 2q x^2)),
    giving mean 0, variance v and kurtosis kappa.

    Args:
        v: Target variance
        kappa: Target kurtosis, 1 < kappa < 1/(2q)
        q: Outer atom mass, in (0, 1/2)
        n: Sample size the outer atoms are scaled by

    Returns:
        DiscreteSpec with four atoms
    """
    v = check_positive(v, "v")
    kappa = check_positive(kappa, "kappa")
    q = check_positive(q, "q")
    n = check_count(n)
    if q >= 0.5:
        raise ParameterError(f"q must lie in (0, 1/2), got {q:g}")
    ceiling = 1.0 / (2.0 * q)
    if not 1.0 < kappa < ceiling:
        raise ParameterError(
            f"kurtosis {kappa:g} not attainable with q = {q:g}; need 1 < kappa < {ceiling:g}"
        )

    x = _invert_kurtosis_map(q, kappa)
    xi = math.sqrt(v / (1.0 - 2.0 * q + 2.0 * q * x * x))
    outer = xi * x
    logger.debug(f"four_point_spec: x={x:.12g}, xi={xi:.12g}, eta={outer / n:.12g}")
    inner = 0.5 - q
    return DiscreteSpec((
        Atom(-outer, q),
        Atom(-xi, inner),
        Atom(xi, inner),
        Atom(outer, q),
    ))


def worst_case_q(n: int, epsilon: float, chi: float) -> float:
    """
    Outer atom mass that makes the four-point law deviate with probability 2 epsilon.

    q = epsilon / (n (1 - chi)) * (1 - 4 epsilon / (n (1 - chi)))^-(n - 1)
    """
    n = check_count(n)
    epsilon = check_epsilon(epsilon)
    chi = check_positive(chi, "chi")
    if chi > 0.5:
        raise ParameterError(f"chi must lie in (0, 1/2], got {chi:g}")
    ratio = epsilon / (n * (1.0 - chi))
    if 4.0 * ratio >= 1.0:
        raise ParameterError(f"4 epsilon / (n (1 - chi)) = {4.0 * ratio:.6g} >= 1")
    return ratio * math.exp(-(n - 1) * math.log1p(-4.0 * ratio))


def worst_case_chi_candidates(n: int, epsilon: float) -> Tuple[float, float]:
    """The two values of chi the kurtosis lower bound is optimized over: (n eps)^(1/4)/2 and 1/2."""
    n = check_count(n)
    epsilon = check_epsilon(epsilon)
    return min(0.5, 0.5 * (n * epsilon) ** 0.25), 0.5
