"""
Adaptation to an unknown variance by Lepski's method.

For each candidate variance bound v_k on a grid, the known-variance
estimator gives an interval I(v_k) at confidence epsilon * nu(v_k). The
suffix intersections J(v_k) = I(v_k) & I(v_{k+1}) & ... shrink as k
decreases; the adaptive estimate is the midpoint of the smallest non-empty
one.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.core.errors import Condition, DomainError, InfeasibleError, ParameterError
from src.core.sample import SampleLike, as_sample
from src.core.validation import check_count, check_epsilon, check_positive
from .influence import InfluenceKind
from .mean_catoni import (
    DEFAULT_TOLERANCE,
    AlphaMode,
    MeanEstimate,
    MeanMethod,
    alpha_known_variance,
    solve_mean,
)

logger = logging.getLogger(__name__)

# Ratios needing more binary digits than this count as outside the dyadic support
MAX_DYADIC_DIGITS = 40


@dataclass(frozen=True)
class GeometricGrid:
    """Variance bounds V rho^(2k), |k| <= s, each with mass 1/(2s+1)."""
    V: float
    rho: float
    s: int

    def __post_init__(self):
        check_positive(self.V, "V")
        if not (math.isfinite(self.rho) and self.rho > 1.0):
            raise ParameterError(f"grid ratio rho must be > 1, got {self.rho!r}")
        object.__setattr__(self, "s", check_count(self.s, "s", minimum=0))

    @classmethod
    def parse(cls, text: str) -> "GeometricGrid":
        """Parse the CLI form 'V:rho:s'."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ParameterError(f"grid '{text}' is not V:rho:s")
        try:
            return cls(V=float(parts[0]), rho=float(parts[1]), s=int(parts[2]))
        except ValueError as e:
            raise ParameterError(f"grid '{text}': {e}") from e

    @property
    def size(self) -> int:
        return 2 * self.s + 1

    def points(self) -> np.ndarray:
        """Grid variances in increasing order."""
        k = np.arange(-self.s, self.s + 1)
        return self.V * self.rho ** (2.0 * k)

    def format(self) -> str:
        return f"{self.V:.17g}:{self.rho:.17g}:{self.s}"


@dataclass(frozen=True)
class GridInterval:
    """Confidence interval built under one candidate variance bound."""
    v_max: float
    center: float
    halfwidth: float

    @property
    def lo(self) -> float:
        return self.center - self.halfwidth

    @property
    def hi(self) -> float:
        return self.center + self.halfwidth


@dataclass
class AdaptiveResult:
    """Adaptive estimate with the interval family it was selected from."""
    theta_tilde: float
    intervals: List[GridInterval]
    final_interval: Tuple[float, float]
    selected_index: int
    alpha: float
    kind: InfluenceKind
    suffix_intersections: List[Optional[Tuple[float, float]]] = field(default_factory=list)

    def to_estimate(self) -> MeanEstimate:
        return MeanEstimate(
            theta_hat=self.theta_tilde,
            alpha=self.alpha,
            kind=self.kind,
            halfwidth=None,
            method=MeanMethod.LEPSKI,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theta_tilde": self.theta_tilde,
            "final_interval": list(self.final_interval),
            "selected_v_max": self.intervals[self.selected_index].v_max,
        }


def nu_geometric_mass(grid: GeometricGrid, k: int) -> float:
    """Mass 1/(2s+1) of grid point k; |k| > s is outside the grid."""
    if abs(k) > grid.s:
        raise DomainError(f"grid index {k} outside [-{grid.s}, {grid.s}]")
    return 1.0 / grid.size


def nu_dyadic_mass(v_max: float, V: float) -> float:
    """
    Mass of the dyadic coding distribution at v_max.

    v_max / V = 2^s * (c_0 + c_1/2 + ... + c_d 2^-d) with c_0 = c_d = 1 gets
    2^(-2(d-1)) / (5 (|s|+2)(|s|+3)); anything else gets 0.
    """
    v_max = check_positive(v_max, "v_max")
    V = check_positive(V, "V")
    ratio = v_max / V
    mantissa, exponent = math.frexp(ratio)
    s = exponent - 1
    bits = 2.0 * mantissa
    d = 0
    while bits != math.floor(bits):
        if d >= MAX_DYADIC_DIGITS:
            return 0.0
        bits *= 2.0
        d += 1
    return 2.0 ** (-2 * (d - 1)) / (5.0 * (abs(s) + 2) * (abs(s) + 3))


def homogeneous_bound(epsilon: float, n: int) -> float:
    """
    B(eps) with halfwidth B(eps) sqrt(v) for the eps-dependent known-variance estimator.

    Returns +inf when n <= 2 log(1/eps).
    """
    log_inv = math.log(1.0 / epsilon)
    ratio = 2.0 * log_inv / n
    if ratio >= 1.0:
        return math.inf
    return math.sqrt(ratio / (1.0 - ratio))


def _check_adaptive_size(n: int, epsilon: float, grid: GeometricGrid) -> float:
    confidence = epsilon / grid.size
    log_inv = math.log(1.0 / confidence)
    if n <= 2.0 * log_inv:
        raise InfeasibleError(
            Condition.ADAPTIVE_SAMPLE_SIZE,
            detail=f"n={n} <= 2 log((2s+1)/epsilon)={2.0 * log_inv:.6g}",
            minimal_n=math.floor(2.0 * log_inv) + 1
        )
    return confidence


def adaptive_estimate(
    sample: SampleLike,
    epsilon: float,
    grid: GeometricGrid,
    kind: InfluenceKind = InfluenceKind.NARROW,
    tolerance: float = DEFAULT_TOLERANCE
) -> AdaptiveResult:
    """
    Lepski estimate over a geometric variance grid.

    Args:
        sample: Observations
        epsilon: Half the tolerated failure probability, split evenly over the grid
        grid: Candidate variance bounds
        kind: Influence function variant
        tolerance: Relative solver tolerance

    Returns:
        AdaptiveResult whose theta_tilde is the midpoint of the smallest non-empty J

    Raises:
        InfeasibleError: if n is too small for every grid point
    """
    sample = as_sample(sample)
    epsilon = check_epsilon(epsilon)
    n = sample.n
    # All points share the confidence eps/(2s+1), so feasibility is all or nothing
    confidence = _check_adaptive_size(n, epsilon, grid)
    bound = homogeneous_bound(confidence, n)

    intervals: List[GridInterval] = []
    alphas: List[float] = []
    for v_k in grid.points():
        alpha = alpha_known_variance(n, float(v_k), confidence, AlphaMode.EPS_DEPENDENT)
        estimate = solve_mean(sample, alpha, kind, tolerance)
        intervals.append(GridInterval(float(v_k), estimate.theta_hat, bound * math.sqrt(v_k)))
        alphas.append(alpha)

    # Suffix intersections from the largest variance down
    suffix: List[Optional[Tuple[float, float]]] = [None] * len(intervals)
    lo, hi = -math.inf, math.inf
    selected = len(intervals) - 1
    for k in range(len(intervals) - 1, -1, -1):
        lo = max(lo, intervals[k].lo)
        hi = min(hi, intervals[k].hi)
        if lo > hi:
            break
        suffix[k] = (lo, hi)
        selected = k

    final = suffix[selected]
    logger.debug(
        f"adaptive_estimate: selected v_max={intervals[selected].v_max:.6g} "
        f"(index {selected - grid.s}), interval [{final[0]:.10g}, {final[1]:.10g}]"
    )
    return AdaptiveResult(
        theta_tilde=0.5 * (final[0] + final[1]),
        intervals=intervals,
        final_interval=final,
        selected_index=selected,
        alpha=alphas[selected],
        kind=InfluenceKind(kind),
        suffix_intersections=suffix,
    )


def adaptive_halfwidth(v: float, grid: GeometricGrid, epsilon: float, n: int) -> float:
    """
    Unobservable deviation bound 2 rho B(eps/(2s+1)) sqrt(v) of the adaptive estimate.

    Raises:
        DomainError: if v lies outside the grid range
        InfeasibleError: if n <= 2 log((2s+1)/eps)
    """
    v = check_positive(v, "v")
    epsilon = check_epsilon(epsilon)
    n = check_count(n)
    span = 2.0 * grid.s * math.log(grid.rho)
    if abs(math.log(v / grid.V)) > span * (1.0 + 1e-12):
        raise DomainError(f"v={v:g} outside the grid range [V rho^-2s, V rho^2s]")
    confidence = _check_adaptive_size(n, epsilon, grid)
    return 2.0 * grid.rho * homogeneous_bound(confidence, n) * math.sqrt(v)
