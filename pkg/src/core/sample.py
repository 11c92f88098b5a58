"""
The Sample type: an ordered, finite, non-empty vector of real observations.
"""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateDataError, ParameterError


@dataclass(frozen=True)
class Sample:
    """Ordered observations Y_1..Y_n, all finite, n >= 1."""
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if values.size == 0:
            raise DegenerateDataError("sample is empty")
        if not np.all(np.isfinite(values)):
            raise ParameterError("sample contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def min(self) -> float:
        return float(self.values.min())

    @property
    def max(self) -> float:
        return float(self.values.max())

    @property
    def scale(self) -> float:
        """1 + max |Y_i|, the reference magnitude for stopping tolerances."""
        return 1.0 + float(np.max(np.abs(self.values)))

    def shifted(self, c: float) -> "Sample":
        return Sample(self.values + c)

    def scaled(self, s: float) -> "Sample":
        return Sample(self.values * s)

    def __len__(self) -> int:
        return self.n


SampleLike = Union[Sample, np.ndarray, Sequence[float]]


def as_sample(data: SampleLike) -> Sample:
    """Coerce array-like input to a validated Sample."""
    if isinstance(data, Sample):
        return data
    return Sample(np.asarray(data, dtype=np.float64))


def load_sample(path: str) -> Sample:
    """
    Read one decimal number per line; blank lines are ignored.

    Args:
        path: Path to the data file

    Returns:
        Sample with the values in file order
    """
    try:
        values = np.loadtxt(path, dtype=np.float64, ndmin=1, comments=None)
    except ValueError as e:
        raise ParameterError(f"cannot parse data file {path}: {e}") from e
    except OSError as e:
        raise ParameterError(f"cannot read data file {path}: {e}") from e
    return Sample(values)
