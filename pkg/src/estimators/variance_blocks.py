"""
Block-threshold M-estimator of the variance.

The sample is cut into q blocks of size p (the last one absorbs the
remainder r). With s_l^2 the unbiased variance of block l,

    Q(beta) = 1/q * sum_l psi(beta s_l^2 - delta)

is non-decreasing in beta, and beta_hat solves Q(beta_hat) = -y. The
estimate v_hat = sqrt(delta (delta - xi)) / beta_hat satisfies
|log v_hat - log v| <= zeta with probability at least 1 - 2 epsilon1,
for a sample whose kurtosis is at most kappa.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.core.errors import (
    Condition,
    DegenerateDataError,
    InfeasibleError,
    ParameterError,
)
from src.core.roots import bisect_boundary, bracket_positive
from src.core.sample import SampleLike, as_sample
from src.core.validation import check_count, check_finite, check_positive
from src.distributions.empirical import unbiased_variance
from .influence import InfluenceKind, psi

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
MAX_ITERATIONS = 100
STALL_WINDOW = 5
MIN_SAMPLE_SIZE = 4


class XiMode(str, Enum):
    """Which bound on xi is used: the quadratic root or 2y(1 + 2y)."""
    TIGHT = "tight"
    SIMPLE = "simple"


@dataclass(frozen=True)
class BlockPlan:
    """n = p q + r; blocks 1..q-1 have size p, block q has size p + r."""
    n: int
    p: int
    q: int
    r: int

    @property
    def ranges(self) -> List[Tuple[int, int]]:
        """Half-open index ranges [start, stop) of the blocks."""
        bounds = [(l * self.p, (l + 1) * self.p) for l in range(self.q)]
        bounds[-1] = (bounds[-1][0], self.n)
        return bounds

    @property
    def sizes(self) -> List[int]:
        return [stop - start for start, stop in self.ranges]


@dataclass(frozen=True)
class BlockSize:
    """Block size with a flag telling whether it was clamped into [2, n/2]."""
    p: int
    clamped: bool = False

    def __int__(self) -> int:
        return self.p


@dataclass(frozen=True)
class VarianceParams:
    """Tuning quantities of the variance estimator and the conditions they were checked against."""
    n: int
    p: int
    q: int
    r: int
    kappa: float
    epsilon1: float
    chi: float
    delta: float
    y: float
    xi: float
    zeta: float
    xi_mode: XiMode
    conditions: Dict[Condition, bool]

    @property
    def feasible(self) -> bool:
        required = _REQUIRED_CONDITIONS[self.xi_mode]
        return all(self.conditions[c] for c in required) and self.xi < self.delta

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "q": self.q,
            "r": self.r,
            "chi": self.chi,
            "delta": self.delta,
            "y": self.y,
            "xi": self.xi,
            "zeta": self.zeta,
            "xi_mode": self.xi_mode.value,
        }


@dataclass
class VarianceEstimate:
    """v_hat with its log-accuracy zeta."""
    beta_hat: float
    v_hat: float
    zeta: float
    params: VarianceParams
    iterations: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "v_hat": self.v_hat,
            "zeta": self.zeta,
            "beta_hat": self.beta_hat,
            "iterations": self.iterations,
            **self.params.to_dict(),
        }


_REQUIRED_CONDITIONS = {
    XiMode.TIGHT: (Condition.TIGHT_DISCRIMINANT, Condition.TIGHT_BLOCK_COUNT),
    XiMode.SIMPLE: (Condition.SIMPLE_CONFIDENCE,),
}

# Reported with every InfeasibleError so the message states the inequality that failed
CONDITION_FORMULAS = {
    Condition.TIGHT_DISCRIMINANT: "(1 + chi delta/p)^2 >= 4 (1 + chi/p) y",
    Condition.TIGHT_BLOCK_COUNT: (
        "q >= 8 log(1/epsilon1) (1 + chi/p) (1 + sqrt(2 chi log(1/epsilon1)/(n - r)))^-2"
    ),
    Condition.SIMPLE_CONFIDENCE: "log(1/epsilon1) <= min(q/(4(1 + sqrt 2)), (n - r)/(8 chi))",
    Condition.OPTIMAL_BLOCK_CONFIDENCE: "log(1/epsilon1) <= n/(36(kappa-1)) - 1/8",
}


def _check_epsilon1(epsilon1: float) -> float:
    epsilon1 = check_finite(epsilon1, "epsilon1")
    if not 0.0 < epsilon1 < 1.0:
        raise ParameterError(f"epsilon1 must lie in (0, 1), got {epsilon1:g}")
    return epsilon1


def _check_kappa(kappa: float) -> float:
    kappa = check_finite(kappa, "kappa")
    if kappa < 1.0:
        raise ParameterError(f"kappa must be >= 1, got {kappa:g}")
    return kappa


def block_plan(n: int, p: int) -> BlockPlan:
    """
    Partition of n observations into blocks of size p.

    Raises:
        ParameterError: unless 2 <= p <= n/2
    """
    n = check_count(n, minimum=MIN_SAMPLE_SIZE)
    p = check_count(p, "p")
    if not 2 <= p <= n // 2:
        raise ParameterError(f"block size p must lie in [2, {n // 2}] for n = {n}, got {p}")
    q = n // p
    return BlockPlan(n=n, p=p, q=q, r=n - p * q)


def check_optimal_block_confidence(n: int, kappa: float, epsilon1: float) -> None:
    """
    Require log(1/eps1) <= n/(36(kappa-1)) - 1/8, under which the optimal block
    size and the closed-form zeta apply. Nothing to check when kappa = 1.

    Raises:
        InfeasibleError: OPTIMAL_BLOCK_CONFIDENCE, with the smallest n that satisfies it
    """
    n = check_count(n)
    kappa = _check_kappa(kappa)
    epsilon1 = _check_epsilon1(epsilon1)
    if kappa == 1.0:
        return
    log_inv = math.log(1.0 / epsilon1)
    ceiling = n / (36.0 * (kappa - 1.0)) - 0.125
    if log_inv > ceiling:
        raise InfeasibleError(
            Condition.OPTIMAL_BLOCK_CONFIDENCE,
            detail=(
                f"{CONDITION_FORMULAS[Condition.OPTIMAL_BLOCK_CONFIDENCE]} fails: "
                f"{log_inv:.6g} > {ceiling:.6g} at n={n}, kappa={kappa:g}, epsilon1={epsilon1:g}"
            ),
            minimal_n=math.ceil(36.0 * (kappa - 1.0) * (log_inv + 0.125)),
        )


def optimal_block_size(n: int, kappa: float, epsilon1: float) -> BlockSize:
    """p = floor(sqrt(n / ((kappa - 1)(4 log(1/eps1) + 1/2)))), clamped into [2, n/2]."""
    n = check_count(n, minimum=MIN_SAMPLE_SIZE)
    kappa = _check_kappa(kappa)
    epsilon1 = _check_epsilon1(epsilon1)
    denominator = (kappa - 1.0) * (4.0 * math.log(1.0 / epsilon1) + 0.5)
    raw = math.floor(math.sqrt(n / denominator)) if denominator > 0.0 else n // 2
    p = min(max(raw, 2), n // 2)
    if p != raw:
        logger.debug(f"optimal_block_size: clamped {raw} to {p} (n={n}, kappa={kappa:g})")
    return BlockSize(p=p, clamped=p != raw)


def default_block_size(n: int, kappa: float, epsilon1: float) -> int:
    """Block size used when none is given: the optimal one, under its confidence condition."""
    check_optimal_block_confidence(n, kappa, epsilon1)
    return optimal_block_size(n, kappa, epsilon1).p


def variance_params(
    n: int,
    p: int,
    kappa: float,
    epsilon1: float,
    xi_mode: XiMode = XiMode.TIGHT
) -> VarianceParams:
    """
    Tuning parameters for block size p at confidence 1 - 2 epsilon1.

    chi = kappa - 1 + 2/(p-1), y = 2 log(1/eps1)/q,
    delta = sqrt(2 p log(1/eps1) / (chi q)), zeta = -log(1 - xi/delta)/2.

    TIGHT: xi = 4y / (1 + c delta + sqrt((1 + c delta)^2 - 4(1 + c) y)), c = chi/p,
    valid when the discriminant is non-negative and
    q >= 8 log(1/eps1)(1 + c)(1 + sqrt(2 chi log(1/eps1)/(n - r)))^-2.
    SIMPLE: xi = 2y(1 + 2y), valid when
    log(1/eps1) <= min(q/(4(1 + sqrt 2)), (n - r)/(8 chi)).

    Raises:
        InfeasibleError: naming the first violated condition, or xi >= delta
    """
    plan = block_plan(n, p)
    kappa = _check_kappa(kappa)
    epsilon1 = _check_epsilon1(epsilon1)
    xi_mode = XiMode(xi_mode)

    log_inv = math.log(1.0 / epsilon1)
    q, r = plan.q, plan.r
    chi = kappa - 1.0 + 2.0 / (p - 1)
    y = 2.0 * log_inv / q
    delta = math.sqrt(2.0 * p * log_inv / (chi * q))
    ratio = chi / p

    head = 1.0 + ratio * delta
    discriminant = head * head - 4.0 * (1.0 + ratio) * y
    block_need = (
        8.0 * log_inv * (1.0 + ratio)
        / (1.0 + math.sqrt(2.0 * chi * log_inv / (n - r))) ** 2
    )
    conditions = {
        Condition.TIGHT_DISCRIMINANT: discriminant >= 0.0,
        Condition.TIGHT_BLOCK_COUNT: q >= block_need,
        Condition.SIMPLE_CONFIDENCE: (
            log_inv <= min(q / (4.0 * (1.0 + math.sqrt(2.0))), (n - r) / (8.0 * chi))
        ),
        Condition.OPTIMAL_BLOCK_CONFIDENCE: (
            kappa > 1.0 and log_inv <= n / (36.0 * (kappa - 1.0)) - 0.125
        ),
    }

    for condition in _REQUIRED_CONDITIONS[xi_mode]:
        if not conditions[condition]:
            raise InfeasibleError(
                condition,
                detail=(
                    f"{CONDITION_FORMULAS[condition]} fails at "
                    f"n={n}, p={p}, kappa={kappa:g}, epsilon1={epsilon1:g}"
                )
            )

    if xi_mode is XiMode.TIGHT:
        xi = 4.0 * y / (head + math.sqrt(discriminant))
    else:
        xi = 2.0 * y * (1.0 + 2.0 * y)

    if xi >= delta:
        raise InfeasibleError(
            Condition.XI_BELOW_DELTA,
            detail=f"xi={xi:.6g} >= delta={delta:.6g}"
        )
    zeta = -0.5 * math.log1p(-xi / delta)

    return VarianceParams(
        n=n, p=p, q=q, r=r,
        kappa=kappa,
        epsilon1=epsilon1,
        chi=chi,
        delta=delta,
        y=y,
        xi=xi,
        zeta=zeta,
        xi_mode=xi_mode,
        conditions=conditions,
    )


def resolve_params(
    n: int,
    p: int,
    kappa: float,
    epsilon1: float,
    xi_mode: Optional[XiMode] = None
) -> VarianceParams:
    """
    variance_params with the default mode policy.

    An explicit xi_mode is used as is. Without one, TIGHT is tried and SIMPLE
    takes over when the tight discriminant is negative.
    """
    if xi_mode is not None:
        return variance_params(n, p, kappa, epsilon1, xi_mode)
    try:
        return variance_params(n, p, kappa, epsilon1, XiMode.TIGHT)
    except InfeasibleError as e:
        if e.condition is not Condition.TIGHT_DISCRIMINANT:
            raise
        logger.info(f"tight xi infeasible at n={n}, p={p}; falling back to simple xi")
        return variance_params(n, p, kappa, epsilon1, XiMode.SIMPLE)


def best_block_size(
    n: int,
    kappa: float,
    epsilon1: float,
    xi_mode: XiMode = XiMode.TIGHT
) -> VarianceParams:
    """
    Parameters with the smallest zeta over every block size p in [2, n/2].

    Raises:
        InfeasibleError: if no block size is feasible (the last failure is re-raised)
    """
    n = check_count(n, minimum=MIN_SAMPLE_SIZE)
    best: Optional[VarianceParams] = None
    last_error: Optional[InfeasibleError] = None
    for p in range(2, n // 2 + 1):
        try:
            params = variance_params(n, p, kappa, epsilon1, xi_mode)
        except InfeasibleError as e:
            last_error = e
            continue
        if best is None or params.zeta < best.zeta:
            best = params
    if best is None:
        raise last_error
    return best


def block_variances(sample: SampleLike, plan: BlockPlan) -> np.ndarray:
    """Unbiased variance of each block, in block order."""
    sample = as_sample(sample)
    if sample.n != plan.n:
        raise ParameterError(f"block plan is for n={plan.n}, sample has n={sample.n}")
    if min(plan.sizes) < 2:
        raise ParameterError("every block needs at least two observations")
    values = sample.values
    head = plan.p * (plan.q - 1)
    out = np.empty(plan.q)
    if plan.q > 1:
        out[:-1] = values[:head].reshape(plan.q - 1, plan.p).var(axis=1, ddof=1)
    out[-1] = values[head:].var(ddof=1)
    return out


def q_criterion(
    sample: SampleLike,
    plan: BlockPlan,
    beta: float,
    delta: float,
    kind: InfluenceKind = InfluenceKind.NARROW
) -> float:
    """
    Q(beta) = 1/q * sum_l psi(beta s_l^2 - delta).

    Args:
        sample: Observations
        plan: Block partition of the sample
        beta: Scale, >= 0
        delta: Threshold
        kind: Influence function variant

    Returns:
        Criterion value, non-decreasing in beta
    """
    beta = check_finite(beta, "beta")
    if beta < 0.0:
        raise ParameterError(f"beta must be >= 0, got {beta:g}")
    return _criterion_from_variances(block_variances(sample, plan), beta, delta, kind)


def _criterion_from_variances(
    variances: np.ndarray,
    beta: float,
    delta: float,
    kind: InfluenceKind
) -> float:
    return float(np.mean(psi(kind, beta * variances - delta)))


def solve_variance(
    sample: SampleLike,
    kappa: float,
    epsilon1: float,
    p: Optional[int] = None,
    xi_mode: Optional[XiMode] = None,
    kind: InfluenceKind = InfluenceKind.NARROW,
    tolerance: float = DEFAULT_TOLERANCE
) -> VarianceEstimate:
    """
    Estimate the variance with a log-accuracy guarantee.

    beta_hat is found by the iteration beta <- beta (delta - y)/(Q(beta) + delta)
    from beta_0 = (delta - y)/V_hat, falling back to bracketing and bisection.

    Args:
        sample: Observations
        kappa: Upper bound on the kurtosis
        epsilon1: Half the tolerated failure probability
        p: Block size; the approximately optimal one by default, which also
            requires the optimal-block confidence condition
        xi_mode: TIGHT, SIMPLE, or None for TIGHT with fallback to SIMPLE
        kind: Influence function variant
        tolerance: Bound on |Q(beta_hat) + y|

    Returns:
        VarianceEstimate with v_hat and zeta

    Raises:
        DegenerateDataError: constant data or fewer than four observations
        InfeasibleError: parameter conditions fail or Q = -y has no root
    """
    sample = as_sample(sample)
    tolerance = check_positive(tolerance, "tolerance")
    n = sample.n
    if n < MIN_SAMPLE_SIZE:
        raise DegenerateDataError(f"variance blocks need at least {MIN_SAMPLE_SIZE} observations")
    if p is None:
        p = default_block_size(n, kappa, epsilon1)
    params = resolve_params(n, p, kappa, epsilon1, xi_mode)
    plan = block_plan(n, params.p)
    kind = InfluenceKind(kind)

    variances = block_variances(sample, plan)
    if not np.any(variances > 0.0):
        raise DegenerateDataError("every block has zero variance")

    delta, y = params.delta, params.y
    floor_value = float(psi(kind, -delta))
    if -y <= floor_value:
        raise InfeasibleError(
            Condition.VARIANCE_ROOT,
            detail=f"y={y:.6g} >= -psi(-delta)={-floor_value:.6g}"
        )

    def Q(beta: float) -> float:
        return _criterion_from_variances(variances, beta, delta, kind)

    v_plugin = unbiased_variance(sample)
    beta, iterations = _iterate_beta(Q, delta, y, v_plugin, tolerance)
    if beta is None:
        start = (delta - y) / v_plugin if delta > y else 1.0 / v_plugin
        lo, hi = bracket_positive(Q, start, -y)
        beta, extra = bisect_boundary(lambda b: Q(b) >= -y, lo, hi, xtol=1e-15 * hi)
        iterations += extra

    v_hat = math.sqrt(delta * (delta - params.xi)) / beta
    return VarianceEstimate(
        beta_hat=beta,
        v_hat=v_hat,
        zeta=params.zeta,
        params=params,
        iterations=iterations,
    )


def _iterate_beta(Q, delta: float, y: float, v_plugin: float, tolerance: float):
    """Multiplicative fixed point; (None, iterations) when it has to give up."""
    if delta <= y:
        return None, 0
    beta = (delta - y) / v_plugin
    value = Q(beta)
    residual = abs(value + y)
    reference = residual
    since_halving = 0
    iterations = 0
    while residual > tolerance:
        if iterations >= MAX_ITERATIONS or value + delta <= 0.0:
            break
        beta = beta * (delta - y) / (value + delta)
        value = Q(beta)
        residual = abs(value + y)
        iterations += 1
        if residual <= 0.5 * reference:
            reference = residual
            since_halving = 0
        else:
            since_halving += 1
            if since_halving >= STALL_WINDOW:
                break
    if residual <= tolerance:
        return beta, iterations
    logger.debug(f"solve_variance: bisection fallback after {iterations} iterations")
    return None, iterations


def zeta_bound_corollary(n: int, kappa: float, epsilon1: float) -> float:
    """
    Closed-form zeta for the approximately optimal block size.

    -1/2 log(1 - 2 sqrt(2(kappa-1) log(1/eps1)/n) exp(4 sqrt((4 log(1/eps1) + 1/2)/((kappa-1) n)))),
    valid when log(1/eps1) <= n/(36(kappa-1)) - 1/8. For large n it behaves
    like sqrt(2(kappa-1) log(1/eps1)/n).

    Raises:
        InfeasibleError: if the confidence condition fails or the log argument is not positive
    """
    n = check_count(n)
    kappa = _check_kappa(kappa)
    if kappa <= 1.0:
        raise ParameterError(f"kappa must be > 1, got {kappa:g}")
    epsilon1 = _check_epsilon1(epsilon1)
    check_optimal_block_confidence(n, kappa, epsilon1)
    log_inv = math.log(1.0 / epsilon1)
    spread = 2.0 * math.sqrt(2.0 * (kappa - 1.0) * log_inv / n)
    inflation = math.exp(4.0 * math.sqrt((4.0 * log_inv + 0.5) / ((kappa - 1.0) * n)))
    argument = 1.0 - spread * inflation
    if argument <= 0.0:
        raise InfeasibleError(
            Condition.OPTIMAL_BLOCK_CONFIDENCE,
            detail=(
                f"{CONDITION_FORMULAS[Condition.OPTIMAL_BLOCK_CONFIDENCE]} holds "
                f"but the log argument {argument:.6g} <= 0"
            )
        )
    return -0.5 * math.log(argument)


def pairwise_variance(sample: SampleLike) -> float:
    """
    1/(n(n-1)) * sum_{i<j} (Y_i - Y_j)^2, equal to the unbiased variance.

    Uses sum_{i<j} (Y_i - Y_j)^2 = n * sum_i (Y_i - mean)^2, so memory stays linear in n.
    """
    sample = as_sample(sample)
    n = sample.n
    if n < 2:
        raise DegenerateDataError("pairwise variance needs at least two observations")
    centered = sample.values - sample.values.mean()
    pair_sum = n * math.fsum(centered * centered)
    return pair_sum / (n * (n - 1))
