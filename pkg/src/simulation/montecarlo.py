"""
Replication runner, deviation quantile curves and interval coverage.

Replications are independent tasks run on a thread pool. Results are
collected by replication index, so the output is the same for one worker
or many.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple, TypeVar

import numpy as np

from src.core.errors import EstimationError, ParameterError, ReplicationError
from src.core.sample import Sample
from src.core.validation import check_count
from .config import CoverageSpec, EstimatorSpec, SimulationConfig

logger = logging.getLogger(__name__)

T = TypeVar("T")


def resolve_threads(threads: int) -> int:
    """Worker count; 0 means one per CPU."""
    threads = check_count(threads, "threads", minimum=0)
    if threads == 0:
        return os.cpu_count() or 1
    return threads


def run_replications(
    config: SimulationConfig,
    task: Callable[[Sample], T],
    threads: int = 1
) -> List[T]:
    """
    Run task on the sample of every replication.

    Args:
        config: Source, sample size, replication count and seed
        task: Function of one replication's sample
        threads: Worker count (0 = one per CPU)

    Returns:
        Task results ordered by replication index

    Raises:
        ReplicationError: the lowest-indexed failing replication, wrapping its error
    """
    workers = min(resolve_threads(threads), config.reps)

    def replicate(index: int) -> T:
        sample = config.draw(index)
        try:
            return task(sample)
        except EstimationError as e:
            raise ReplicationError(index, e) from e

    logger.info(f"Running {config.reps} replications of n={config.n} on {workers} worker(s)")
    if workers == 1:
        return [replicate(index) for index in range(config.reps)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(replicate, range(config.reps)))


@dataclass
class QuantileCurve:
    """Sorted |estimate - m| of one estimator against levels i/reps."""
    estimator: EstimatorSpec
    levels: List[float] = field(default_factory=list)
    deviations: List[float] = field(default_factory=list)

    @property
    def label(self) -> str:
        return self.estimator.label

    @property
    def reps(self) -> int:
        return len(self.deviations)

    def at(self, level: float) -> float:
        """Empirical quantile: the smallest deviation whose level reaches `level`."""
        if not 0.0 < level <= 1.0:
            raise ParameterError(f"quantile level must lie in (0, 1], got {level!r}")
        index = min(max(math.ceil(level * self.reps - 1e-9) - 1, 0), self.reps - 1)
        return self.deviations[index]

    def band(self, level: float, width: float = 2.0) -> Tuple[float, float]:
        """
        Order-statistic band of the quantile at `level`.

        The quantiles at level -+ width * sqrt(level (1 - level) / reps),
        i.e. `width` Monte Carlo standard errors either side.
        """
        spread = width * math.sqrt(level * (1.0 - level) / self.reps)
        lo_level = max(level - spread, 1.0 / self.reps)
        hi_level = min(level + spread, 1.0)
        return self.at(lo_level), self.at(hi_level)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "estimator": self.label,
            "levels": self.levels,
            "deviations": self.deviations,
        }


@dataclass
class CoverageReport:
    """How often an interval method covered the true parameter."""
    method: CoverageSpec
    hits: int
    reps: int
    coverage: float
    target: float
    mc_stderr: float

    @classmethod
    def from_hits(cls, method: CoverageSpec, hits: int, reps: int, target: float) -> "CoverageReport":
        coverage = hits / reps
        return cls(
            method=method,
            hits=hits,
            reps=reps,
            coverage=coverage,
            target=target,
            mc_stderr=math.sqrt(coverage * (1.0 - coverage) / reps),
        )

    @property
    def label(self) -> str:
        return self.method.label

    @property
    def miss_rate(self) -> float:
        return 1.0 - self.coverage

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.label,
            "reps": self.reps,
            "hits": self.hits,
            "coverage": self.coverage,
            "target": self.target,
            "mc_stderr": self.mc_stderr,
        }


def prepare_estimators(config: SimulationConfig) -> Tuple[EstimatorSpec, ...]:
    """
    Resolve default parameters and check every estimator at (n, epsilon).

    Raises:
        ParameterError: no estimator configured
        InfeasibleError: an estimator cannot run at this configuration
    """
    if not config.estimators:
        raise ParameterError("at least one estimator is required")
    moments = config.moments
    resolved = tuple(spec.resolve(moments, config.n) for spec in config.estimators)
    for spec in resolved:
        spec.check(config.n, config.epsilon)
    return resolved


def deviation_quantiles(config: SimulationConfig, threads: int = 1) -> List[QuantileCurve]:
    """
    Quantile functions of |estimate - m| for every configured estimator.

    Args:
        config: Simulation configuration; m comes from the exact source moments
        threads: Worker count (0 = one per CPU)

    Returns:
        One QuantileCurve per estimator, in configuration order
    """
    estimators = prepare_estimators(config)
    m = config.moments.m

    def task(sample: Sample) -> np.ndarray:
        return np.array([
            abs(spec.estimate(sample, config.epsilon, config.kind, config.tolerances) - m)
            for spec in estimators
        ])

    deviations = np.vstack(run_replications(config, task, threads))
    deviations.sort(axis=0)
    levels = (np.arange(1, config.reps + 1) / config.reps).tolist()

    curves = [
        QuantileCurve(estimator=spec, levels=levels, deviations=deviations[:, j].tolist())
        for j, spec in enumerate(estimators)
    ]
    logger.info(f"Tabulated deviation quantiles of {len(curves)} estimator(s)")
    return curves


def coverage(config: SimulationConfig, method: CoverageSpec, threads: int = 1) -> CoverageReport:
    """
    Fraction of replications whose interval contains the true parameter.

    Args:
        config: Simulation configuration (its estimator list is not used)
        method: Interval method; defaults are resolved from the source moments
        threads: Worker count (0 = one per CPU)

    Returns:
        CoverageReport with its target 1 - 2 epsilon
    """
    moments = config.moments
    method = method.resolve(moments, config.n, config.epsilon)
    method.check(config.n, config.epsilon, moments)

    def task(sample: Sample) -> bool:
        return method.covers(sample, config.epsilon, moments, config.kind, config.tolerances)

    hits = sum(run_replications(config, task, threads))
    report = CoverageReport.from_hits(method, hits, config.reps, method.target(config.epsilon))
    logger.info(
        f"Coverage of {report.label}: {report.coverage:.4f} "
        f"(target {report.target:.4f}, stderr {report.mc_stderr:.2g})"
    )
    return report
