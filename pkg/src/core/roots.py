"""
Bracketing helpers for monotone scalar equations.

Both estimators solve an equation whose left-hand side is monotone in the
unknown, so a sign change can always be localized by interval halving.
"""

import logging
from typing import Callable, Tuple

from .errors import NumericalError

logger = logging.getLogger(__name__)


def bisect_boundary(
    predicate: Callable[[float], bool],
    lo: float,
    hi: float,
    xtol: float,
    max_iter: int = 400
) -> Tuple[float, int]:
    """
    Locate the boundary of a monotone predicate on [lo, hi].

    The predicate must be False to the left of the boundary and True to the
    right of it. If it already holds at lo, lo is returned.

    Args:
        predicate: Monotone boolean function
        lo: Left end of the search interval
        hi: Right end of the search interval (predicate(hi) must hold)
        xtol: Width at which halving stops
        max_iter: Safety cap on halvings

    Returns:
        (boundary estimate, number of halvings)
    """
    if predicate(lo):
        return lo, 0

    iterations = 0
    while hi - lo > xtol and iterations < max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # Adjacent floats; no further progress possible
            break
        if predicate(mid):
            hi = mid
        else:
            lo = mid
        iterations += 1

    return 0.5 * (lo + hi), iterations


def bracket_positive(
    func: Callable[[float], float],
    start: float,
    target: float,
    max_steps: int = 200
) -> Tuple[float, float]:
    """
    Bracket func(b) = target on (0, inf) for a non-decreasing func.

    Starting from `start`, the end points are multiplied or divided by two
    until func(lo) <= target <= func(hi).

    Returns:
        (lo, hi) with the target between func(lo) and func(hi)

    Raises:
        NumericalError: if no bracket is found within max_steps doublings
    """
    lo = hi = start
    if func(start) <= target:
        for _ in range(max_steps):
            hi = 2.0 * hi
            if func(hi) >= target:
                return hi / 2.0, hi
        raise NumericalError(
            f"could not bracket root above {start:g} in {max_steps} doublings"
        )

    for _ in range(max_steps):
        lo = 0.5 * lo
        if func(lo) <= target:
            return lo, 2.0 * lo
    raise NumericalError(
        f"could not bracket root below {start:g} in {max_steps} halvings"
    )
