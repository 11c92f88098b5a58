"""
Influence functions for the Catoni M-estimators.

psi comes in two variants, both squeezed between -log(1 - x + x^2/2) and
log(1 + x + x^2/2):

    wide:   psi(x) = sign(x) log(1 + |x| + x^2/2)
    narrow: psi(x) = sign(x) -log(1 - |x| + x^2/2)   for |x| <= 1
            psi(x) = sign(x) log 2                    for |x| >= 1

chi is a concave majorant of the narrow psi used in the kurtosis-mean
recipe, and g(x) = x - psi_wide(x) is the remainder that controls the bias
of the criterion.

All functions accept a scalar or an array and return the same shape.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

import numpy as np
from scipy.special import gammainc

from src.core.errors import DomainError

ArrayLike = Union[float, np.ndarray]

# Above this magnitude x^2 would overflow; log(1 + x + x^2/2) is rearranged
_WIDE_LARGE = 1e150


class InfluenceKind(str, Enum):
    """Which of the two extreme influence functions to use."""
    NARROW = "narrow"
    WIDE = "wide"


@dataclass(frozen=True)
class ChiConstants:
    """Breakpoint, value and slope of chi at its junction, its supremum, and the constant a."""
    x1: float
    y1: float
    p1: float
    chi_sup: float
    a: float

    def to_dict(self) -> dict:
        return {
            "x1": self.x1,
            "y1": self.y1,
            "p1": self.p1,
            "chi_sup": self.chi_sup,
            "a": self.a,
        }


def _compute_chi_constants() -> ChiConstants:
    root = math.sqrt(4.0 * math.sqrt(2.0) - 5.0)
    base = 2.0 * (math.sqrt(2.0) - 1.0)
    x1 = 1.0 - root
    y1 = -math.log(base)
    p1 = root / base
    chi_sup = y1 + 2.0 * p1 * p1
    a = 3.0 * math.exp(chi_sup) / (4.0 * math.log(4.0))
    return ChiConstants(x1=x1, y1=y1, p1=p1, chi_sup=chi_sup, a=a)


_CHI = _compute_chi_constants()


def chi_constants() -> ChiConstants:
    """Constants of the chi construction, derived from their closed forms."""
    return _CHI


def _as_finite_array(x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("influence functions require finite input")
    return arr


def _unwrap(result: np.ndarray, x: ArrayLike) -> ArrayLike:
    if np.ndim(x) == 0:
        return float(result)
    return result


def _odd_extension(magnitude: Callable[[np.ndarray], np.ndarray], x: ArrayLike) -> ArrayLike:
    arr = _as_finite_array(x)
    mag = magnitude(np.abs(arr).reshape(-1)).reshape(arr.shape)
    return _unwrap(np.copysign(mag, arr), x)


def _wide_magnitude(t: np.ndarray) -> np.ndarray:
    """log(1 + t + t^2/2) for t >= 0."""
    large = t > _WIDE_LARGE
    if not np.any(large):
        return np.log1p(t + 0.5 * t * t)

    out = np.empty_like(t)
    small = ~large
    ts = t[small]
    out[small] = np.log1p(ts + 0.5 * ts * ts)
    tl = t[large]
    inv = 1.0 / tl
    # log(t^2/2) + log1p(2(1 + t)/t^2)
    out[large] = 2.0 * np.log(tl) - math.log(2.0) + np.log1p(2.0 * inv * (inv + 1.0))
    return out


def _narrow_magnitude(t: np.ndarray) -> np.ndarray:
    """-log(1 - t + t^2/2) on [0, 1], log 2 beyond."""
    u = np.minimum(t, 1.0)
    return -np.log1p(-u + 0.5 * u * u)


def psi(kind: InfluenceKind, x: ArrayLike) -> ArrayLike:
    """
    Evaluate the influence function.

    Args:
        kind: NARROW or WIDE
        x: Finite scalar or array

    Returns:
        psi(x) with the shape of x

    Raises:
        DomainError: if any entry of x is not finite
    """
    kind = InfluenceKind(kind)
    if kind is InfluenceKind.WIDE:
        return _odd_extension(_wide_magnitude, x)
    return _odd_extension(_narrow_magnitude, x)


def chi(x: ArrayLike) -> ArrayLike:
    """
    Concave majorant of the narrow psi.

    Equal to psi_narrow up to x1, then the quadratic
    y1 + p1 (x - x1) - (x - x1)^2 / 8 up to its maximum at x1 + 4 p1,
    and constant chi_sup afterwards.
    """
    arr = _as_finite_array(x)
    c = _CHI
    offset = arr - c.x1
    quadratic = c.y1 + c.p1 * offset - 0.125 * offset * offset
    out = np.where(
        arr <= c.x1,
        np.copysign(_narrow_magnitude(np.abs(arr)), arr),
        np.where(offset <= 4.0 * c.p1, quadratic, c.chi_sup),
    )
    return _unwrap(out, x)


def _g_magnitude(t: np.ndarray) -> np.ndarray:
    # For t <= 1, t - log(1 + t + t^2/2) = -log(1 - P(3, t)) with P the
    # regularized lower incomplete gamma; this avoids the cancellation near 0.
    near = t <= 1.0
    out = np.empty_like(t)
    out[near] = -np.log1p(-gammainc(3.0, t[near]))
    far = t[~near]
    out[~near] = far - _wide_magnitude(far)
    return out


def g(x: ArrayLike) -> ArrayLike:
    """Remainder g(x) = x - psi_wide(x); odd, |g(x)| <= min(|x|, x^2/(4(1+sqrt 2)), |x|^3/6)."""
    return _odd_extension(_g_magnitude, x)
