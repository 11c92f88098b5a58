"""
Catoni M-estimator of the mean.

theta_hat solves r(theta) = 0 with

    r(theta) = 1/(alpha n) * sum_i psi(alpha (Y_i - theta)),

a non-increasing function with r(min Y) >= 0 >= r(max Y). The solver runs
the fixed-point iteration theta <- theta + r(theta) from the empirical mean
and falls back to bisection when that stalls or leaves the data range.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from src.core.errors import (
    Condition,
    DegenerateDataError,
    InfeasibleError,
)
from src.core.roots import bisect_boundary
from src.core.sample import SampleLike, as_sample
from src.core.validation import check_count, check_epsilon, check_positive
from src.distributions.empirical import unbiased_variance
from .influence import InfluenceKind, psi

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
MAX_FIXED_POINT_ITERATIONS = 100
# Residual must halve within this many consecutive steps
STALL_WINDOW = 5


class AlphaMode(str, Enum):
    """How alpha is tuned from the variance bound."""
    EPS_DEPENDENT = "eps-dependent"
    EPS_FREE = "eps-free"


class MeanMethod(str, Enum):
    """Recipe that produced a MeanEstimate."""
    KNOWN_VARIANCE = "known-v"
    EPS_FREE = "eps-free"
    PLUG_IN = "plugin"
    LEPSKI = "lepski"
    KURTOSIS = "kurtosis"


@dataclass
class MeanEstimate:
    """Output of a mean estimator."""
    theta_hat: float
    alpha: float
    kind: InfluenceKind
    iterations: int = 0
    halfwidth: Optional[float] = None
    method: Optional[MeanMethod] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theta_hat": self.theta_hat,
            "alpha": self.alpha,
            "kind": self.kind.value,
            "iterations": self.iterations,
            "halfwidth": self.halfwidth,
            "method": self.method.value if self.method else None,
            **self.details,
        }


@dataclass(frozen=True)
class ThetaRadius:
    """Deviation radius theta_+ - m for a given alpha, exact and simplified."""
    exact: float
    simple: float


def criterion(
    sample: SampleLike,
    alpha: float,
    kind: InfluenceKind,
    theta: float
) -> float:
    """
    Empirical criterion r(theta).

    Args:
        sample: Observations
        alpha: Scale parameter, > 0
        kind: Influence function variant
        theta: Location at which to evaluate

    Returns:
        1/(alpha n) * sum psi(alpha (Y_i - theta))
    """
    sample = as_sample(sample)
    alpha = check_positive(alpha, "alpha")
    terms = psi(kind, alpha * (sample.values - theta))
    return float(np.sum(terms)) / (alpha * sample.n)


def _log_inv(epsilon: float) -> float:
    return math.log(1.0 / epsilon)


def _bisect_zero_interval(r, lo: float, hi: float, xtol: float):
    """Midpoint of [inf{r <= 0}, sup{r >= 0}] within [lo, hi]."""
    lower, it_lower = bisect_boundary(lambda t: r(t) <= 0.0, lo, hi, xtol)
    if r(hi) >= 0.0:
        upper, it_upper = hi, 0
    else:
        upper, it_upper = bisect_boundary(lambda t: r(t) < 0.0, lo, hi, xtol)
    return 0.5 * (lower + upper), it_lower + it_upper


def solve_mean(
    sample: SampleLike,
    alpha: float,
    kind: InfluenceKind = InfluenceKind.NARROW,
    tolerance: float = DEFAULT_TOLERANCE
) -> MeanEstimate:
    """
    Solve r(theta) = 0.

    Args:
        sample: Observations
        alpha: Scale parameter, > 0
        kind: Influence function variant
        tolerance: Relative tolerance; the absolute one is tolerance * (1 + max|Y_i|)

    Returns:
        MeanEstimate with theta_hat in [min Y, max Y]; method is left unset
    """
    sample = as_sample(sample)
    alpha = check_positive(alpha, "alpha")
    tolerance = check_positive(tolerance, "tolerance")
    kind = InfluenceKind(kind)

    lo, hi = sample.min, sample.max
    if lo == hi:
        return MeanEstimate(theta_hat=lo, alpha=alpha, kind=kind, iterations=0)

    atol = tolerance * sample.scale

    def r(theta: float) -> float:
        return criterion(sample, alpha, kind, theta)

    theta = min(max(float(np.mean(sample.values)), lo), hi)
    residual = r(theta)
    iterations = 0
    reference = abs(residual)
    since_halving = 0
    fallback = None

    while abs(residual) > atol:
        if iterations >= MAX_FIXED_POINT_ITERATIONS:
            fallback = "iteration cap"
            break
        step = theta + residual
        if not lo <= step <= hi:
            fallback = "step left the data range"
            break
        theta = step
        residual = r(theta)
        iterations += 1
        if abs(residual) <= 0.5 * reference:
            reference = abs(residual)
            since_halving = 0
        else:
            since_halving += 1
            if since_halving >= STALL_WINDOW:
                fallback = "residual stalled"
                break

    if fallback is None and not (residual == 0.0 and kind is InfluenceKind.NARROW):
        return MeanEstimate(theta_hat=theta, alpha=alpha, kind=kind, iterations=iterations)

    if fallback is None:
        # Narrow psi can vanish on a whole interval
        fallback = "flat zero set"
    logger.debug(f"solve_mean: bisection fallback after {iterations} iterations ({fallback})")
    theta, extra = _bisect_zero_interval(r, lo, hi, atol)
    return MeanEstimate(
        theta_hat=theta,
        alpha=alpha,
        kind=kind,
        iterations=iterations + extra
    )


def _check_known_variance_inputs(n: int, v: float, epsilon: float):
    return check_count(n), check_positive(v, "v"), check_epsilon(epsilon)


def _eps_dependent_halfwidth(n: int, v: float, log_inv: float) -> float:
    if n <= 2.0 * log_inv:
        raise InfeasibleError(
            Condition.KNOWN_VARIANCE_SAMPLE_SIZE,
            detail=f"n={n} <= 2 log(1/epsilon)={2.0 * log_inv:.6g}",
            minimal_n=math.floor(2.0 * log_inv) + 1
        )
    return math.sqrt(2.0 * v * log_inv / (n * (1.0 - 2.0 * log_inv / n)))


def _check_eps_free(n: int, log_inv: float) -> None:
    bound = 2.0 * (1.0 + log_inv)
    if n <= bound:
        raise InfeasibleError(
            Condition.EPS_FREE_SAMPLE_SIZE,
            detail=f"n={n} <= 2(1 + log(1/epsilon))={bound:.6g}",
            minimal_n=math.floor(bound) + 1
        )


def alpha_known_variance(
    n: int,
    v: float,
    epsilon: float,
    mode: AlphaMode = AlphaMode.EPS_DEPENDENT
) -> float:
    """
    Scale parameter for a known variance bound v.

    EPS_DEPENDENT: alpha = sqrt(2 log(1/eps) / (n (v + eta^2))), needs n > 2 log(1/eps).
    EPS_FREE: alpha = sqrt(2 / (n v)), needs n > 2 (1 + log(1/eps)).
    """
    n, v, epsilon = _check_known_variance_inputs(n, v, epsilon)
    log_inv = _log_inv(epsilon)
    if AlphaMode(mode) is AlphaMode.EPS_FREE:
        _check_eps_free(n, log_inv)
        return math.sqrt(2.0 / (n * v))
    eta = _eps_dependent_halfwidth(n, v, log_inv)
    return math.sqrt(2.0 * log_inv / (n * (v + eta * eta)))


def halfwidth_known_variance(
    n: int,
    v: float,
    epsilon: float,
    mode: AlphaMode = AlphaMode.EPS_DEPENDENT
) -> float:
    """Deviation bound holding with probability at least 1 - 2 epsilon."""
    n, v, epsilon = _check_known_variance_inputs(n, v, epsilon)
    log_inv = _log_inv(epsilon)
    if AlphaMode(mode) is AlphaMode.EPS_FREE:
        _check_eps_free(n, log_inv)
        shrink = 0.5 + 0.5 * math.sqrt(1.0 - 2.0 * (1.0 + log_inv) / n)
        return (1.0 + log_inv) / shrink * math.sqrt(v / (2.0 * n))
    return _eps_dependent_halfwidth(n, v, log_inv)


def theta_bounds(n: int, v: float, epsilon: float, alpha: float) -> ThetaRadius:
    """
    Deviation radius of theta_hat for an arbitrary alpha.

    With probability at least 1 - 2 epsilon, |theta_hat - m| is below

        (alpha v / 2 + log(1/eps)/(alpha n)) / (1/2 + 1/2 sqrt(1 - alpha^2 v - 2 log(1/eps)/n))

    which is itself below the simple form with denominator
    1 - alpha^2 v / 2 - log(1/eps)/n.

    Raises:
        InfeasibleError: if alpha^2 v + 2 log(1/eps)/n > 1
    """
    n, v, epsilon = _check_known_variance_inputs(n, v, epsilon)
    alpha = check_positive(alpha, "alpha")
    log_inv = _log_inv(epsilon)
    slack = 1.0 - alpha * alpha * v - 2.0 * log_inv / n
    if slack < 0.0:
        raise InfeasibleError(
            Condition.ALPHA_RANGE,
            detail=f"alpha^2 v + 2 log(1/epsilon)/n = {1.0 - slack:.6g} > 1"
        )
    numerator = 0.5 * alpha * v + log_inv / (alpha * n)
    exact = numerator / (0.5 + 0.5 * math.sqrt(slack))
    simple = numerator / (1.0 - 0.5 * alpha * alpha * v - log_inv / n)
    return ThetaRadius(exact=exact, simple=simple)


def estimate_mean_known_variance(
    sample: SampleLike,
    v: float,
    epsilon: float,
    mode: AlphaMode = AlphaMode.EPS_DEPENDENT,
    kind: InfluenceKind = InfluenceKind.NARROW,
    tolerance: float = DEFAULT_TOLERANCE
) -> MeanEstimate:
    """
    Catoni estimate with alpha tuned to a known variance bound.

    Args:
        sample: Observations
        v: Variance (or an upper bound on it)
        epsilon: Half the tolerated failure probability
        mode: EPS_DEPENDENT or EPS_FREE tuning of alpha
        kind: Influence function variant
        tolerance: Relative solver tolerance

    Returns:
        MeanEstimate with its 1 - 2 epsilon halfwidth
    """
    sample = as_sample(sample)
    mode = AlphaMode(mode)
    alpha = alpha_known_variance(sample.n, v, epsilon, mode)
    estimate = solve_mean(sample, alpha, kind, tolerance)
    estimate.halfwidth = halfwidth_known_variance(sample.n, v, epsilon, mode)
    estimate.method = (
        MeanMethod.EPS_FREE if mode is AlphaMode.EPS_FREE else MeanMethod.KNOWN_VARIANCE
    )
    return estimate


def estimate_mean_plugin(
    sample: SampleLike,
    epsilon: float,
    kind: InfluenceKind = InfluenceKind.NARROW,
    tolerance: float = DEFAULT_TOLERANCE
) -> MeanEstimate:
    """
    Catoni estimate with the unbiased variance estimate plugged in for v.

    No halfwidth is reported: the plug-in has no proved deviation bound.
    """
    sample = as_sample(sample)
    if sample.n < 2:
        raise DegenerateDataError("plug-in variance needs at least two observations")
    v_hat = unbiased_variance(sample)
    if v_hat == 0.0:
        raise DegenerateDataError("plug-in variance estimate is zero")
    alpha = alpha_known_variance(sample.n, v_hat, epsilon, AlphaMode.EPS_DEPENDENT)
    estimate = solve_mean(sample, alpha, kind, tolerance)
    estimate.method = MeanMethod.PLUG_IN
    return estimate
