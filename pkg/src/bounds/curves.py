"""
Tabulation of bounds over a grid of confidence levels.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import IO, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import DomainError, InfeasibleError, ParameterError
from src.core.formatting import DEFAULT_DIGITS, write_csv
from src.estimators.kurtosis_mean import halfwidth_kurtosis, plugin_params
from src.estimators.lepski import GeometricGrid, adaptive_halfwidth
from src.estimators.mean_catoni import AlphaMode, halfwidth_known_variance
from .lower import lower_bound_kurtosis, lower_bound_plain
from .query import BoundQuery
from .upper import (
    chebyshev_halfwidth,
    empirical_mean_best_halfwidth,
    fourth_moment_halfwidth,
    gaussian_halfwidth,
    kurtosis_halfwidth,
)

logger = logging.getLogger(__name__)

DEFAULT_GRID_RHO = 1.05
DEFAULT_GRID_S = 95


@dataclass
class BoundCurve:
    """(epsilon, halfwidth) points of one named bound."""
    bound_name: str
    points: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def epsilons(self) -> List[float]:
        return [eps for eps, _ in self.points]

    @property
    def halfwidths(self) -> List[float]:
        return [h for _, h in self.points]


@dataclass(frozen=True)
class _BoundEntry:
    evaluate: Callable[[BoundQuery, Optional[GeometricGrid]], float]
    needs_kappa: bool = False
    lower: bool = False


def _catoni(q: BoundQuery, grid: Optional[GeometricGrid]) -> float:
    return halfwidth_known_variance(q.n, q.v, q.epsilon, AlphaMode.EPS_DEPENDENT)


def _catoni_eps_free(q: BoundQuery, grid: Optional[GeometricGrid]) -> float:
    return halfwidth_known_variance(q.n, q.v, q.epsilon, AlphaMode.EPS_FREE)


def _adaptive(q: BoundQuery, grid: Optional[GeometricGrid]) -> float:
    if grid is None:
        grid = GeometricGrid(V=q.v, rho=DEFAULT_GRID_RHO, s=DEFAULT_GRID_S)
    return adaptive_halfwidth(q.v, grid, q.epsilon, q.n)


def _kurtosis_mean(q: BoundQuery, grid: Optional[GeometricGrid]) -> float:
    params = plugin_params(q.n, q.epsilon, q.require_kappa())
    return halfwidth_kurtosis(params, q.v, observable=True)


_BOUNDS: Dict[str, _BoundEntry] = {
    "chebyshev": _BoundEntry(lambda q, g: chebyshev_halfwidth(q)),
    "kurtosis": _BoundEntry(lambda q, g: kurtosis_halfwidth(q), needs_kappa=True),
    "fourth_moment": _BoundEntry(lambda q, g: fourth_moment_halfwidth(q), needs_kappa=True),
    "empirical_best": _BoundEntry(lambda q, g: empirical_mean_best_halfwidth(q)),
    "gaussian": _BoundEntry(lambda q, g: gaussian_halfwidth(q)),
    "lower_plain": _BoundEntry(lambda q, g: lower_bound_plain(q), lower=True),
    "lower_kurtosis": _BoundEntry(lambda q, g: lower_bound_kurtosis(q), needs_kappa=True, lower=True),
    "catoni": _BoundEntry(_catoni),
    "catoni_eps_free": _BoundEntry(_catoni_eps_free),
    "adaptive": _BoundEntry(_adaptive),
    "kurtosis_mean": _BoundEntry(_kurtosis_mean, needs_kappa=True),
}

BOUND_NAMES: Tuple[str, ...] = tuple(_BOUNDS)


def applicable_bounds(q: BoundQuery) -> List[str]:
    """Bound names that can be evaluated for this query (kappa-aware ones need kappa)."""
    return [name for name, entry in _BOUNDS.items() if q.kappa is not None or not entry.needs_kappa]


def check_epsilon_grid(epsilons: Iterable[float]) -> List[float]:
    grid = [float(e) for e in epsilons]
    if not grid:
        raise ParameterError("epsilon grid is empty")
    for eps in grid:
        if not 0.0 < eps <= 0.5:
            raise ParameterError(f"grid epsilon {eps!r} outside (0, 1/2]")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ParameterError("epsilon grid must be strictly increasing")
    return grid


def log_epsilon_grid(start: float, stop: float, count: int) -> List[float]:
    """count log-spaced levels between start and stop, returned in increasing order."""
    if count < 1:
        raise ParameterError(f"grid count must be >= 1, got {count}")
    if not (start > 0.0 and stop > 0.0):
        raise ParameterError("grid end points must be positive")
    lo, hi = sorted((start, stop))
    if count == 1:
        return check_epsilon_grid([hi])
    values = np.geomspace(lo, hi, count)
    return check_epsilon_grid(values.tolist())


def parse_epsilon_grid(text: str) -> List[float]:
    """Parse 'start:stop:count', e.g. '0.1:1e-14:200'."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ParameterError(f"epsilon grid '{text}' is not start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise ParameterError(f"epsilon grid '{text}': {e}") from e
    return log_epsilon_grid(start, stop, count)


def bound_curve(
    template: BoundQuery,
    bound_name: str,
    epsilons: Sequence[float],
    grid: Optional[GeometricGrid] = None
) -> BoundCurve:
    """
    Tabulate one bound over increasing confidence levels.

    Args:
        template: Query whose epsilon is replaced by each grid value
        bound_name: One of BOUND_NAMES
        epsilons: Strictly increasing levels in (0, 1/2]
        grid: Variance grid for the adaptive bound (centered on v by default)

    Returns:
        BoundCurve; infeasible points are +inf, lower bounds outside
        their domain are nan
    """
    entry = _BOUNDS.get(bound_name)
    if entry is None:
        raise ParameterError(f"unknown bound '{bound_name}'; choose from {', '.join(BOUND_NAMES)}")
    if entry.needs_kappa:
        template.require_kappa()

    curve = BoundCurve(bound_name=bound_name)
    for eps in check_epsilon_grid(epsilons):
        query = template.at(eps)
        try:
            value = entry.evaluate(query, grid)
        except InfeasibleError:
            value = math.inf
        except DomainError:
            if not entry.lower:
                raise
            value = math.nan
        curve.points.append((eps, value))
    logger.debug(f"bound_curve: {bound_name} on {len(curve.points)} levels")
    return curve


CURVE_HEADER = ("epsilon", "bound", "halfwidth")


def write_curve_csv(
    curves: Iterable[BoundCurve],
    stream: IO[str],
    digits: int = DEFAULT_DIGITS
) -> None:
    rows = (
        (float(eps), curve.bound_name, float(halfwidth))
        for curve in curves
        for eps, halfwidth in curve.points
    )
    write_csv(stream, CURVE_HEADER, rows, digits)
