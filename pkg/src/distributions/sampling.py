"""
Seeded samplers.

Draws use numpy's PCG64 generator seeded through SeedSequence. A stream is
addressed by (seed, index), so replication i of a simulation gets the same
draws whichever worker runs it. Gaussian variates come from the normal
quantile applied to a uniform strictly inside (0, 1).
"""

from typing import Optional, Union

import numpy as np
from scipy.special import ndtri

from src.core.errors import ParameterError
from src.core.sample import Sample
from src.core.validation import check_count
from .specs import DiscreteSpec, MixtureSpec

SeedLike = Union[int, np.random.Generator]

MAX_SEED = 2 ** 64 - 1
_MANTISSA = 2 ** 53


def check_seed(seed: int) -> int:
    seed = check_count(seed, "seed", minimum=0)
    if seed > MAX_SEED:
        raise ParameterError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed


def make_generator(seed: SeedLike, index: Optional[int] = None) -> np.random.Generator:
    """
    Generator for a seed, or for stream `index` under that seed.

    Passing an existing Generator returns it unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    seed = check_seed(seed)
    if index is None:
        sequence = np.random.SeedSequence(seed)
    else:
        sequence = np.random.SeedSequence(seed, spawn_key=(check_count(index, "index", minimum=0),))
    return np.random.Generator(np.random.PCG64(sequence))


def _open_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniforms on the 2^-53 grid shifted by half a step, never 0 or 1."""
    return (rng.integers(0, _MANTISSA, size=n, dtype=np.int64) + 0.5) / _MANTISSA


def _pick(cumulative: np.ndarray, u: np.ndarray) -> np.ndarray:
    index = np.searchsorted(cumulative, u, side="right")
    return np.minimum(index, cumulative.size - 1)


def _cumulative(weights: np.ndarray) -> np.ndarray:
    cumulative = np.cumsum(weights)
    return cumulative / cumulative[-1]


def sample_mixture(spec: MixtureSpec, n: int, seed: SeedLike) -> Sample:
    """
    Draw n i.i.d. observations from a Gaussian mixture.

    Args:
        spec: Mixture to sample from
        n: Sample size
        seed: 64-bit seed or a Generator

    Returns:
        Sample, bitwise identical for identical (spec, n, seed)
    """
    n = check_count(n)
    rng = make_generator(seed)
    weights = np.array([c.weight for c in spec.components])
    means = np.array([c.mean for c in spec.components])
    sds = np.array([c.sd for c in spec.components])

    component = _pick(_cumulative(weights), rng.random(n))
    z = ndtri(_open_uniform(rng, n))
    return Sample(means[component] + sds[component] * z)


def sample_discrete(spec: DiscreteSpec, n: int, seed: SeedLike) -> Sample:
    """Draw n i.i.d. observations from a finite law by inverse CDF on the atoms."""
    n = check_count(n)
    rng = make_generator(seed)
    values = np.array([a.value for a in spec.atoms])
    probs = np.array([a.prob for a in spec.atoms])
    return Sample(values[_pick(_cumulative(probs), rng.random(n))])
