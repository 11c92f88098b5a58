"""
Shared fixtures for the catoni test suite.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.core.sample import Sample  # noqa: E402
from src.distributions import PUBLISHED_MIXTURES  # noqa: E402


@pytest.fixture
def gaussian_sample() -> Sample:
    """2000 standard normal draws from a fixed generator."""
    rng = np.random.default_rng(20240607)
    return Sample(rng.standard_normal(2000))


@pytest.fixture
def symmetric_sample() -> Sample:
    """Alternating -1, 1 of length 100."""
    return Sample(np.tile([-1.0, 1.0], 50))


@pytest.fixture(params=sorted(PUBLISHED_MIXTURES))
def published_mixture(request):
    """(name, spec, rounded reference (m, v, kappa)) for every experiment mixture."""
    spec, reference = PUBLISHED_MIXTURES[request.param]
    return request.param, spec, reference


@pytest.fixture
def data_file(tmp_path):
    """Write values one per line and return the path."""
    def write(values, name="data.txt"):
        path = tmp_path / name
        path.write_text("".join(f"{v!r}\n" for v in values))
        return str(path)
    return write
