"""
Mean estimation with an estimated variance and a kurtosis bound.

The confidence budget epsilon is split into epsilon1 (variance) and
epsilon2 (mean). The variance estimator gives v_hat with
|log v_hat - log v| <= zeta; alpha_hat = sqrt(c / v_hat) then yields an
observable interval theta_hat +- sqrt(eta v_hat / (1 - eta)) exp(zeta/2)
holding with probability at least 1 - 2 epsilon.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, Optional

from scipy.optimize import minimize_scalar

from src.core.errors import Condition, InfeasibleError, NumericalError, ParameterError
from src.core.sample import SampleLike, as_sample
from src.core.validation import check_count, check_epsilon, check_finite, check_positive
from .influence import InfluenceKind, chi_constants
from .mean_catoni import DEFAULT_TOLERANCE, MeanEstimate, MeanMethod, solve_mean
from .variance_blocks import (
    DEFAULT_TOLERANCE as VARIANCE_TOLERANCE,
    XiMode,
    optimal_block_size,
    resolve_params,
    solve_variance,
    zeta_bound_corollary,
)

logger = logging.getLogger(__name__)

SPLIT_START = 0.5
SPLIT_TOLERANCE = 1e-9
MAX_SPLIT_ITERATIONS = 50
# Below this zeta the variance is treated as known: x = inf
ZETA_FLOOR = 1e-8


class ZetaSource(str, Enum):
    """Where the variance log-accuracy zeta comes from."""
    COROLLARY = "corollary"
    BLOCKS = "blocks"
    AUTO = "auto"


class XRule(str, Enum):
    """Choice of the perturbation width x."""
    APPROXIMATE = "approximate"
    EXACT = "exact"


@dataclass(frozen=True)
class KurtosisMeanParams:
    """Tuning of the kurtosis-aware mean estimator."""
    n: int
    epsilon: float
    y_split: float
    x: float
    zeta: float
    eta: float
    gamma: float
    a: float
    c: float
    zeta_source: ZetaSource = ZetaSource.COROLLARY
    p: Optional[int] = None
    xi_mode: Optional[XiMode] = None
    iterations: int = 0

    @property
    def epsilon1(self) -> float:
        return self.y_split * self.epsilon

    @property
    def epsilon2(self) -> float:
        return (1.0 - self.y_split) * self.epsilon

    @property
    def perturbation(self) -> float:
        """((a+1)/3) x^2 sinh(zeta/2)^2, which must stay below 1."""
        if math.isinf(self.x):
            return 0.0
        return (self.a + 1.0) / 3.0 * self.x ** 2 * math.sinh(0.5 * self.zeta) ** 2

    @property
    def feasible(self) -> bool:
        return self.perturbation < 1.0 and self.eta < 1.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon1": self.epsilon1,
            "epsilon2": self.epsilon2,
            "x": self.x,
            "zeta": self.zeta,
            "eta": self.eta,
            "gamma": self.gamma,
            "c": self.c,
            "zeta_source": self.zeta_source.value,
            "p": self.p,
        }


def default_kappa_max(n: int) -> float:
    """Rule of thumb kappa_max = 6n/1000, meant for n >= 1000."""
    n = check_count(n)
    if n < 1000:
        raise ParameterError(f"kappa_max has no default below n = 1000 (n = {n}); pass it explicitly")
    return 6.0 * n / 1000.0


def _entropy(x: float, epsilon2: float) -> float:
    """log(1 + 1/x) + log(1/eps2)."""
    tail = 0.0 if math.isinf(x) else math.log1p(1.0 / x)
    return tail + math.log(1.0 / epsilon2)


def approximate_x(zeta: float, epsilon2: float) -> float:
    """x = (2(a+1)/3 log(1/eps2))^(-1/3) sinh(zeta/2)^(-2/3); +inf below the zeta floor."""
    if zeta < ZETA_FLOOR:
        return math.inf
    a = chi_constants().a
    scale = 2.0 * (a + 1.0) / 3.0 * math.log(1.0 / epsilon2)
    return scale ** (-1.0 / 3.0) * math.sinh(0.5 * zeta) ** (-2.0 / 3.0)


def exact_x(zeta: float, epsilon2: float) -> float:
    """x minimizing (log(1 + 1/x) + log(1/eps2)) / (1 - ((a+1)/3) x^2 sinh(zeta/2)^2)."""
    if zeta < ZETA_FLOOR:
        return math.inf
    a = chi_constants().a
    weight = (a + 1.0) / 3.0 * math.sinh(0.5 * zeta) ** 2
    x_max = 1.0 / math.sqrt(weight)

    def ratio(x: float) -> float:
        return _entropy(x, epsilon2) / (1.0 - weight * x * x)

    result = minimize_scalar(
        ratio,
        bounds=(1e-9 * x_max, (1.0 - 1e-9) * x_max),
        method="bounded",
        options={"xatol": 1e-12 * x_max},
    )
    if not result.success:
        raise NumericalError(f"exact x minimization failed: {result.message}")
    return float(result.x)


_X_RULES = {
    XRule.APPROXIMATE: approximate_x,
    XRule.EXACT: exact_x,
}


def params_for_zeta(
    n: int,
    zeta: float,
    epsilon1: float,
    epsilon2: float,
    x: Optional[float] = None,
    x_rule: XRule = XRule.APPROXIMATE,
    **provenance: Any
) -> KurtosisMeanParams:
    """
    eta, gamma and c for a given zeta and confidence split.

    eta = 2 cosh(zeta/2)^2 (log(1 + 1/x) + log(1/eps2)) / (n (1 - ((a+1)/3) x^2 sinh(zeta/2)^2)),
    gamma = eta / (1 - eta), c = eta / (cosh(zeta/2)^2 (1 + gamma)).

    Raises:
        InfeasibleError: if the perturbation term reaches 1 or eta >= 1
    """
    n = check_count(n)
    zeta = check_finite(zeta, "zeta")
    if zeta < 0.0:
        raise ParameterError(f"zeta must be >= 0, got {zeta:g}")
    epsilon1 = check_positive(epsilon1, "epsilon1")
    epsilon2 = check_epsilon(epsilon2, "epsilon2")
    if x is None:
        x = _X_RULES[XRule(x_rule)](zeta, epsilon2)
    else:
        x = check_positive(x, "x")

    a = chi_constants().a
    half = 0.5 * zeta
    perturbation = 0.0 if math.isinf(x) else (a + 1.0) / 3.0 * x * x * math.sinh(half) ** 2
    if perturbation >= 1.0:
        raise InfeasibleError(
            Condition.VARIANCE_UNCERTAINTY,
            detail=f"((a+1)/3) x^2 sinh(zeta/2)^2 = {perturbation:.6g} >= 1 at zeta={zeta:.6g}"
        )
    entropy = _entropy(x, epsilon2)
    cosh2 = math.cosh(half) ** 2
    eta = 2.0 * cosh2 * entropy / (n * (1.0 - perturbation))
    if eta >= 1.0:
        raise InfeasibleError(Condition.ETA_BELOW_ONE, detail=f"eta={eta:.6g}")
    gamma = eta / (1.0 - eta)
    c = 2.0 * entropy / (n * (1.0 - perturbation) * (1.0 + gamma))
    epsilon = epsilon1 + epsilon2
    return KurtosisMeanParams(
        n=n,
        epsilon=epsilon,
        y_split=epsilon1 / epsilon,
        x=x,
        zeta=zeta,
        eta=eta,
        gamma=gamma,
        a=a,
        c=c,
        **provenance,
    )


class _ZetaEvaluator:
    """zeta at a given epsilon1 from the chosen source."""

    def __init__(
        self,
        n: int,
        kappa_max: float,
        source: ZetaSource,
        p: Optional[int],
        xi_mode: Optional[XiMode]
    ):
        self.n = n
        self.kappa_max = kappa_max
        self.source = source
        self.p = p
        self.xi_mode = xi_mode
        self.used_source = source
        self.used_p: Optional[int] = p
        self.used_mode: Optional[XiMode] = xi_mode

    def __call__(self, epsilon1: float) -> float:
        if self.source is ZetaSource.COROLLARY:
            return self._corollary(epsilon1)
        if self.source is ZetaSource.BLOCKS or self.p is not None:
            return self._blocks(epsilon1)
        try:
            return self._corollary(epsilon1)
        except InfeasibleError:
            return self._blocks(epsilon1)

    def _corollary(self, epsilon1: float) -> float:
        self.used_source = ZetaSource.COROLLARY
        self.used_p = None
        self.used_mode = None
        return zeta_bound_corollary(self.n, self.kappa_max, epsilon1)

    def _blocks(self, epsilon1: float) -> float:
        p = self.p
        if p is None:
            p = optimal_block_size(self.n, self.kappa_max, epsilon1).p
        params = resolve_params(self.n, p, self.kappa_max, epsilon1, self.xi_mode)
        self.used_source = ZetaSource.BLOCKS
        self.used_p = params.p
        self.used_mode = params.xi_mode
        return params.zeta


def plugin_params(
    n: int,
    epsilon: float,
    kappa_max: float,
    zeta_source: ZetaSource = ZetaSource.AUTO,
    p: Optional[int] = None,
    xi_mode: Optional[XiMode] = None,
    x_rule: XRule = XRule.APPROXIMATE
) -> KurtosisMeanParams:
    """
    Plug-in recipe: balance epsilon1 = y epsilon against epsilon2 with y = 1/(1 + x).

    Starting from y = 1/2, alternate zeta = zeta(y epsilon), x = x(zeta, (1-y) epsilon)
    and y = 1/(1 + x) until x moves by less than 1e-9 relative.

    Args:
        n: Sample size
        epsilon: Total confidence budget (interval holds with probability 1 - 2 epsilon)
        kappa_max: Kurtosis upper bound
        zeta_source: COROLLARY, BLOCKS, or AUTO (corollary when valid and p is not forced)
        p: Block size for the BLOCKS source
        xi_mode: xi bound for the BLOCKS source
        x_rule: APPROXIMATE closed form or EXACT minimization

    Returns:
        KurtosisMeanParams at the fixed point

    Raises:
        InfeasibleError: variance too uncertain at some step
        NumericalError: no convergence in 50 iterations
    """
    n = check_count(n)
    epsilon = check_epsilon(epsilon)
    kappa_max = check_finite(kappa_max, "kappa_max")
    if kappa_max < 1.0:
        raise ParameterError(f"kappa_max must be >= 1, got {kappa_max:g}")
    zeta_of = _ZetaEvaluator(n, kappa_max, ZetaSource(zeta_source), p, xi_mode)
    x_of = _X_RULES[XRule(x_rule)]

    y_split = SPLIT_START
    x = math.nan
    for iteration in range(1, MAX_SPLIT_ITERATIONS + 1):
        epsilon1 = y_split * epsilon
        epsilon2 = (1.0 - y_split) * epsilon
        zeta = zeta_of(epsilon1)
        x_next = x_of(zeta, epsilon2)
        if math.isinf(x_next):
            logger.debug(f"plugin_params: zeta={zeta:.3g} below floor, variance treated as known")
            x = x_next
            break
        if not math.isnan(x) and abs(x_next - x) <= SPLIT_TOLERANCE * x_next:
            x = x_next
            break
        x = x_next
        y_split = 1.0 / (1.0 + x)
    else:
        raise NumericalError(
            f"epsilon split did not converge in {MAX_SPLIT_ITERATIONS} iterations"
        )

    logger.debug(
        f"plugin_params: n={n}, y={y_split:.6g}, x={x:.6g}, zeta={zeta:.6g} "
        f"after {iteration} iterations"
    )
    params = params_for_zeta(
        n,
        zeta,
        epsilon1,
        epsilon2,
        x=x,
        zeta_source=zeta_of.used_source,
        p=zeta_of.used_p,
        xi_mode=zeta_of.used_mode,
        iterations=iteration,
    )
    # epsilon1 and epsilon2 of the result are exactly the values zeta and x were evaluated at
    return replace(params, epsilon=epsilon, y_split=y_split)


def halfwidth_kurtosis(
    params: KurtosisMeanParams,
    v: float,
    observable: bool = True,
    outer: bool = False
) -> float:
    """
    Deviation bounds of the kurtosis-aware estimate.

    observable:        sqrt(eta v_hat / (1 - eta)) exp(zeta/2), with v = v_hat
    not observable:    sqrt(eta v / (1 - eta)), with the true variance v
    outer (not obs.):  sqrt(eta v / (1 - eta)) exp(zeta)
    """
    v = check_positive(v, "v")
    if params.eta >= 1.0:
        raise InfeasibleError(Condition.ETA_BELOW_ONE, detail=f"eta={params.eta:.6g}")
    base = math.sqrt(params.eta * v / (1.0 - params.eta))
    if observable:
        return base * math.exp(0.5 * params.zeta)
    if outer:
        return base * math.exp(params.zeta)
    return base


def estimate_mean_kurtosis(
    sample: SampleLike,
    epsilon: float,
    kappa_max: Optional[float] = None,
    kind: InfluenceKind = InfluenceKind.NARROW,
    zeta_source: ZetaSource = ZetaSource.AUTO,
    p: Optional[int] = None,
    xi_mode: Optional[XiMode] = None,
    x_rule: XRule = XRule.APPROXIMATE,
    tolerance: float = DEFAULT_TOLERANCE,
    variance_tolerance: float = VARIANCE_TOLERANCE
) -> MeanEstimate:
    """
    Mean estimate with an observable confidence interval from a kurtosis bound.

    Args:
        sample: Observations
        epsilon: Interval holds with probability at least 1 - 2 epsilon
        kappa_max: Kurtosis upper bound; 6n/1000 when omitted (n >= 1000)
        kind: Influence function of the mean criterion
        zeta_source, p, xi_mode, x_rule: see plugin_params
        tolerance: Relative tolerance of the mean solver
        variance_tolerance: Residual tolerance of the variance solver

    Returns:
        MeanEstimate with method KURTOSIS; v_hat and zeta are in details
    """
    sample = as_sample(sample)
    n = sample.n
    if kappa_max is None:
        kappa_max = default_kappa_max(n)
    params = plugin_params(n, epsilon, kappa_max, zeta_source, p, xi_mode, x_rule)

    variance = solve_variance(
        sample,
        kappa_max,
        params.epsilon1,
        p=params.p,
        xi_mode=params.xi_mode,
        tolerance=variance_tolerance,
    )
    alpha_hat = math.sqrt(params.c / variance.v_hat)
    estimate = solve_mean(sample, alpha_hat, kind, tolerance)
    estimate.halfwidth = halfwidth_kurtosis(params, variance.v_hat, observable=True)
    estimate.method = MeanMethod.KURTOSIS
    estimate.details = {
        "v_hat": variance.v_hat,
        "zeta": params.zeta,
        "epsilon1": params.epsilon1,
    }
    return estimate
