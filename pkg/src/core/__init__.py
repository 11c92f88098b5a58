# Core Module
from .errors import (
    Condition,
    EstimationError,
    ParameterError,
    DomainError,
    InfeasibleError,
    DegenerateDataError,
    NumericalError,
    ReplicationError,
)
from .sample import Sample, SampleLike, as_sample, load_sample
from .roots import bisect_boundary, bracket_positive
from .validation import check_finite, check_positive, check_epsilon, check_count
from .formatting import format_float, write_csv

__all__ = [
    "Condition",
    "EstimationError",
    "ParameterError",
    "DomainError",
    "InfeasibleError",
    "DegenerateDataError",
    "NumericalError",
    "ReplicationError",
    "Sample",
    "SampleLike",
    "as_sample",
    "load_sample",
    "bisect_boundary",
    "bracket_positive",
    "check_finite",
    "check_positive",
    "check_epsilon",
    "check_count",
    "format_float",
    "write_csv",
]
