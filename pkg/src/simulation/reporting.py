"""
CSV writers for simulation results.
"""

from typing import IO, Iterable

from src.core.formatting import DEFAULT_DIGITS, write_csv
from .montecarlo import CoverageReport, QuantileCurve

QUANTILE_HEADER = ("estimator", "level", "deviation")
COVERAGE_HEADER = ("method", "reps", "hits", "coverage", "target")


def write_quantile_csv(
    curves: Iterable[QuantileCurve],
    stream: IO[str],
    digits: int = DEFAULT_DIGITS
) -> None:
    rows = (
        (curve.label, float(level), float(deviation))
        for curve in curves
        for level, deviation in zip(curve.levels, curve.deviations)
    )
    write_csv(stream, QUANTILE_HEADER, rows, digits)


def write_coverage_csv(
    reports: Iterable[CoverageReport],
    stream: IO[str],
    digits: int = DEFAULT_DIGITS
) -> None:
    rows = (
        (report.label, report.reps, report.hits, float(report.coverage), float(report.target))
        for report in reports
    )
    write_csv(stream, COVERAGE_HEADER, rows, digits)
