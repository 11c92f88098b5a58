# Simulation Module
from .config import (
    CoverageMethod,
    CoverageSpec,
    EstimatorKind,
    EstimatorSpec,
    SimulationConfig,
    Tolerances,
    parse_estimators,
    parse_source,
)
from .montecarlo import (
    CoverageReport,
    QuantileCurve,
    coverage,
    deviation_quantiles,
    prepare_estimators,
    resolve_threads,
    run_replications,
)
from .reporting import write_coverage_csv, write_quantile_csv

__all__ = [
    "CoverageMethod",
    "CoverageSpec",
    "EstimatorKind",
    "EstimatorSpec",
    "SimulationConfig",
    "Tolerances",
    "parse_estimators",
    "parse_source",
    "CoverageReport",
    "QuantileCurve",
    "coverage",
    "deviation_quantiles",
    "prepare_estimators",
    "resolve_threads",
    "run_replications",
    "write_coverage_csv",
    "write_quantile_csv",
]
