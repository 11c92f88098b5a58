"""
Classical empirical statistics used as baselines and plug-ins.
"""

import numpy as np

from src.core.errors import DegenerateDataError
from src.core.sample import SampleLike, as_sample


def empirical_mean(sample: SampleLike) -> float:
    return float(np.mean(as_sample(sample).values))


def empirical_median(sample: SampleLike) -> float:
    """Middle order statistic; the average of the two central ones for even n."""
    return float(np.median(as_sample(sample).values))


def unbiased_variance(sample: SampleLike) -> float:
    """
    Unbiased variance estimate 1/(n-1) * sum (Y_i - M)^2.

    Raises:
        DegenerateDataError: if n < 2
    """
    sample = as_sample(sample)
    if sample.n < 2:
        raise DegenerateDataError("unbiased variance needs at least two observations")
    return float(np.var(sample.values, ddof=1))
