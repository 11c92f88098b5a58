"""
Simulation configuration: the source law, replication settings, and the
estimator and interval descriptors compared across replications.

Descriptors are written on the command line as `name` or `name=param`,
e.g. `mean,median,known-v=93.5,plugin,lepski=93.5:1.05:95,kurtosis=12`.
Parameters left out are filled from the source moments by `resolve`.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Tuple, Union

from src.core.errors import DegenerateDataError, ParameterError
from src.core.sample import Sample
from src.core.validation import check_count, check_epsilon
from src.distributions.empirical import empirical_mean, empirical_median
from src.distributions.sampling import check_seed, make_generator
from src.distributions.specs import (
    PUBLISHED_MIXTURES,
    DiscreteSpec,
    MixtureMoments,
    MixtureSpec,
    parse_mixture,
)
from src.distributions.worst_case import four_point_spec, three_point_spec
from src.estimators.influence import InfluenceKind
from src.estimators.kurtosis_mean import default_kappa_max, estimate_mean_kurtosis, plugin_params
from src.estimators.lepski import GeometricGrid, adaptive_estimate, adaptive_halfwidth
from src.estimators.mean_catoni import (
    DEFAULT_TOLERANCE,
    AlphaMode,
    alpha_known_variance,
    estimate_mean_known_variance,
    estimate_mean_plugin,
    halfwidth_known_variance,
)
from src.estimators.variance_blocks import (
    DEFAULT_TOLERANCE as VARIANCE_TOLERANCE,
    default_block_size,
    resolve_params,
    solve_variance,
)

Source = Union[MixtureSpec, DiscreteSpec]

DEFAULT_GRID_RHO = 1.05
DEFAULT_GRID_S = 95


@dataclass(frozen=True)
class Tolerances:
    """Solver tolerances handed to every estimator of a run."""
    mean: float = DEFAULT_TOLERANCE
    variance: float = VARIANCE_TOLERANCE


class EstimatorKind(str, Enum):
    """Point estimators whose deviations are tabulated."""
    EMPIRICAL_MEAN = "mean"
    EMPIRICAL_MEDIAN = "median"
    CATONI_KNOWN_V = "known-v"
    CATONI_EPS_FREE = "eps-free"
    CATONI_PLUG_IN = "plugin"
    LEPSKI = "lepski"
    KURTOSIS = "kurtosis"


class CoverageMethod(str, Enum):
    """Interval-producing methods whose coverage can be measured."""
    CATONI_KNOWN_V = "known-v"
    CATONI_EPS_FREE = "eps-free"
    LEPSKI = "lepski"
    KURTOSIS = "kurtosis"
    VARIANCE = "variance"


def _split_descriptor(text: str) -> Tuple[str, Optional[str]]:
    name, sep, param = text.strip().partition("=")
    name = name.strip()
    if not name:
        raise ParameterError(f"empty descriptor in '{text}'")
    return name, (param.strip() if sep else None)


def _parse_float(text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError as e:
        raise ParameterError(f"{what} '{text}' is not a number") from e
    if not math.isfinite(value):
        raise ParameterError(f"{what} must be finite, got '{text}'")
    return value


def _parse_block_size(text: str) -> int:
    try:
        p = int(text)
    except ValueError as e:
        raise ParameterError(f"block size '{text}' is not an integer") from e
    return check_count(p, "p")


def _default_kappa_max(moments: MixtureMoments, n: int) -> float:
    if n >= 1000:
        return default_kappa_max(n)
    if moments.kappa is None:
        raise ParameterError("kappa_max is required when the source has zero variance")
    return moments.kappa


def _require_variance(moments: MixtureMoments) -> float:
    if moments.v <= 0.0:
        raise DegenerateDataError("source has zero variance")
    return moments.v


@dataclass(frozen=True)
class EstimatorSpec:
    """One point estimator and its tuning parameter, if any."""
    kind: EstimatorKind
    v: Optional[float] = None
    grid: Optional[GeometricGrid] = None
    kappa_max: Optional[float] = None

    @classmethod
    def parse(cls, text: str) -> "EstimatorSpec":
        name, param = _split_descriptor(text)
        try:
            kind = EstimatorKind(name)
        except ValueError as e:
            choices = ", ".join(k.value for k in EstimatorKind)
            raise ParameterError(f"unknown estimator '{name}'; choose from {choices}") from e
        if param is None:
            return cls(kind)
        if kind in (EstimatorKind.CATONI_KNOWN_V, EstimatorKind.CATONI_EPS_FREE):
            return cls(kind, v=_parse_float(param, "variance"))
        if kind is EstimatorKind.LEPSKI:
            return cls(kind, grid=GeometricGrid.parse(param))
        if kind is EstimatorKind.KURTOSIS:
            return cls(kind, kappa_max=_parse_float(param, "kappa_max"))
        raise ParameterError(f"estimator '{name}' takes no parameter")

    @property
    def label(self) -> str:
        if self.v is not None:
            return f"{self.kind.value}={self.v:g}"
        if self.grid is not None:
            return f"{self.kind.value}={self.grid.format()}"
        if self.kappa_max is not None:
            return f"{self.kind.value}={self.kappa_max:g}"
        return self.kind.value

    def resolve(self, moments: MixtureMoments, n: int) -> "EstimatorSpec":
        """Fill missing parameters from the source moments."""
        kind = self.kind
        if kind in (EstimatorKind.CATONI_KNOWN_V, EstimatorKind.CATONI_EPS_FREE) and self.v is None:
            return replace(self, v=_require_variance(moments))
        if kind is EstimatorKind.LEPSKI and self.grid is None:
            grid = GeometricGrid(V=_require_variance(moments), rho=DEFAULT_GRID_RHO, s=DEFAULT_GRID_S)
            return replace(self, grid=grid)
        if kind is EstimatorKind.KURTOSIS and self.kappa_max is None:
            return replace(self, kappa_max=_default_kappa_max(moments, n))
        return self

    def check(self, n: int, epsilon: float) -> None:
        """Raise the error the estimator would raise at (n, epsilon), before any draw."""
        kind = self.kind
        if kind is EstimatorKind.CATONI_KNOWN_V:
            alpha_known_variance(n, self.v, epsilon, AlphaMode.EPS_DEPENDENT)
        elif kind is EstimatorKind.CATONI_EPS_FREE:
            alpha_known_variance(n, self.v, epsilon, AlphaMode.EPS_FREE)
        elif kind is EstimatorKind.CATONI_PLUG_IN:
            if n < 2:
                raise DegenerateDataError("plug-in variance needs at least two observations")
            alpha_known_variance(n, 1.0, epsilon, AlphaMode.EPS_DEPENDENT)
        elif kind is EstimatorKind.LEPSKI:
            adaptive_halfwidth(self.grid.V, self.grid, epsilon, n)
        elif kind is EstimatorKind.KURTOSIS:
            plugin_params(n, epsilon, self.kappa_max)

    def estimate(
        self,
        sample: Sample,
        epsilon: float,
        kind: InfluenceKind,
        tolerances: Tolerances
    ) -> float:
        estimator = self.kind
        if estimator is EstimatorKind.EMPIRICAL_MEAN:
            return empirical_mean(sample)
        if estimator is EstimatorKind.EMPIRICAL_MEDIAN:
            return empirical_median(sample)
        if estimator is EstimatorKind.CATONI_KNOWN_V:
            return estimate_mean_known_variance(
                sample, self.v, epsilon, AlphaMode.EPS_DEPENDENT, kind, tolerances.mean
            ).theta_hat
        if estimator is EstimatorKind.CATONI_EPS_FREE:
            return estimate_mean_known_variance(
                sample, self.v, epsilon, AlphaMode.EPS_FREE, kind, tolerances.mean
            ).theta_hat
        if estimator is EstimatorKind.CATONI_PLUG_IN:
            return estimate_mean_plugin(sample, epsilon, kind, tolerances.mean).theta_hat
        if estimator is EstimatorKind.LEPSKI:
            return adaptive_estimate(sample, epsilon, self.grid, kind, tolerances.mean).theta_tilde
        return estimate_mean_kurtosis(
            sample,
            epsilon,
            self.kappa_max,
            kind,
            tolerance=tolerances.mean,
            variance_tolerance=tolerances.variance,
        ).theta_hat


@dataclass(frozen=True)
class CoverageSpec:
    """One interval method; an infinite halfwidth is the whole line and always covers."""
    method: CoverageMethod
    v: Optional[float] = None
    grid: Optional[GeometricGrid] = None
    kappa_max: Optional[float] = None
    epsilon1: Optional[float] = None
    p: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "CoverageSpec":
        """
        Parse `known-v[=v]`, `eps-free[=v]`, `lepski[=V:rho:s]`,
        `kurtosis[=kappa_max]` or `variance[=kappa_max[:epsilon1[:p]]]`.
        """
        name, param = _split_descriptor(text)
        try:
            method = CoverageMethod(name)
        except ValueError as e:
            choices = ", ".join(m.value for m in CoverageMethod)
            raise ParameterError(f"unknown coverage method '{name}'; choose from {choices}") from e
        if param is None:
            return cls(method)
        if method in (CoverageMethod.CATONI_KNOWN_V, CoverageMethod.CATONI_EPS_FREE):
            return cls(method, v=_parse_float(param, "variance"))
        if method is CoverageMethod.LEPSKI:
            return cls(method, grid=GeometricGrid.parse(param))
        if method is CoverageMethod.KURTOSIS:
            return cls(method, kappa_max=_parse_float(param, "kappa_max"))
        kappa_text, _, rest = param.partition(":")
        eps_text, _, p_text = rest.partition(":")
        epsilon1 = _parse_float(eps_text, "epsilon1") if eps_text else None
        p = _parse_block_size(p_text) if p_text else None
        if p is not None and epsilon1 is None:
            raise ParameterError(f"block size needs epsilon1 in '{text}'")
        return cls(method, kappa_max=_parse_float(kappa_text, "kappa_max"), epsilon1=epsilon1, p=p)

    @property
    def label(self) -> str:
        if self.v is not None:
            return f"{self.method.value}={self.v:g}"
        if self.grid is not None:
            return f"{self.method.value}={self.grid.format()}"
        if self.kappa_max is not None and self.epsilon1 is not None and self.p is not None:
            return f"{self.method.value}={self.kappa_max:g}:{self.epsilon1:g}:{self.p}"
        if self.kappa_max is not None and self.epsilon1 is not None:
            return f"{self.method.value}={self.kappa_max:g}:{self.epsilon1:g}"
        if self.kappa_max is not None:
            return f"{self.method.value}={self.kappa_max:g}"
        return self.method.value

    def resolve(self, moments: MixtureMoments, n: int, epsilon: float) -> "CoverageSpec":
        method = self.method
        if method in (CoverageMethod.CATONI_KNOWN_V, CoverageMethod.CATONI_EPS_FREE) and self.v is None:
            return replace(self, v=_require_variance(moments))
        if method is CoverageMethod.LEPSKI and self.grid is None:
            grid = GeometricGrid(V=_require_variance(moments), rho=DEFAULT_GRID_RHO, s=DEFAULT_GRID_S)
            return replace(self, grid=grid)
        if method is CoverageMethod.KURTOSIS and self.kappa_max is None:
            return replace(self, kappa_max=_default_kappa_max(moments, n))
        if method is CoverageMethod.VARIANCE:
            _require_variance(moments)
            kappa_max = self.kappa_max
            if kappa_max is None:
                kappa_max = _default_kappa_max(moments, n)
            epsilon1 = self.epsilon1 if self.epsilon1 is not None else epsilon
            return replace(self, kappa_max=kappa_max, epsilon1=epsilon1)
        return self

    def target(self, epsilon: float) -> float:
        """Guaranteed coverage 1 - 2 epsilon (epsilon1 for the variance interval)."""
        if self.method is CoverageMethod.VARIANCE:
            return 1.0 - 2.0 * self.epsilon1
        return 1.0 - 2.0 * epsilon

    def check(self, n: int, epsilon: float, moments: MixtureMoments) -> None:
        method = self.method
        if method is CoverageMethod.CATONI_KNOWN_V:
            halfwidth_known_variance(n, self.v, epsilon, AlphaMode.EPS_DEPENDENT)
        elif method is CoverageMethod.CATONI_EPS_FREE:
            halfwidth_known_variance(n, self.v, epsilon, AlphaMode.EPS_FREE)
        elif method is CoverageMethod.LEPSKI:
            adaptive_halfwidth(_require_variance(moments), self.grid, epsilon, n)
        elif method is CoverageMethod.KURTOSIS:
            plugin_params(n, epsilon, self.kappa_max)
        else:
            epsilon1 = check_epsilon(self.epsilon1, "epsilon1")
            p = self.p if self.p is not None else default_block_size(n, self.kappa_max, epsilon1)
            resolve_params(n, p, self.kappa_max, epsilon1)

    def covers(
        self,
        sample: Sample,
        epsilon: float,
        moments: MixtureMoments,
        kind: InfluenceKind,
        tolerances: Tolerances
    ) -> bool:
        """Whether the interval built from this sample contains the true parameter."""
        method = self.method
        if method is CoverageMethod.VARIANCE:
            estimate = solve_variance(
                sample, self.kappa_max, self.epsilon1, p=self.p, kind=kind, tolerance=tolerances.variance
            )
            return abs(math.log(estimate.v_hat) - math.log(moments.v)) <= estimate.zeta
        if method is CoverageMethod.LEPSKI:
            result = adaptive_estimate(sample, epsilon, self.grid, kind, tolerances.mean)
            halfwidth = adaptive_halfwidth(moments.v, self.grid, epsilon, sample.n)
            return abs(result.theta_tilde - moments.m) <= halfwidth
        if method is CoverageMethod.KURTOSIS:
            estimate = estimate_mean_kurtosis(
                sample,
                epsilon,
                self.kappa_max,
                kind,
                tolerance=tolerances.mean,
                variance_tolerance=tolerances.variance,
            )
        else:
            mode = AlphaMode.EPS_FREE if method is CoverageMethod.CATONI_EPS_FREE else AlphaMode.EPS_DEPENDENT
            estimate = estimate_mean_known_variance(sample, self.v, epsilon, mode, kind, tolerances.mean)
        return abs(estimate.theta_hat - moments.m) <= estimate.halfwidth


def parse_estimators(text: str) -> List[EstimatorSpec]:
    """Comma-separated estimator descriptors."""
    specs = [EstimatorSpec.parse(part) for part in text.split(",") if part.strip()]
    if not specs:
        raise ParameterError("at least one estimator is required")
    return specs


def _parse_numbers(text: str, count: int, what: str) -> List[float]:
    parts = text.split(",")
    if len(parts) != count:
        raise ParameterError(f"{what} source needs {count} comma-separated numbers, got '{text}'")
    return [_parse_float(part, what) for part in parts]


def parse_source(text: str, n: int) -> Source:
    """
    Parse a simulation source.

    Accepts `worst3:v,eta`, `worst4:v,kappa,q` (worst-case laws built for
    sample size n), a published mixture name, or a mixture spec `w:mu:sd,...`.
    """
    text = text.strip()
    kind, sep, rest = text.partition(":")
    if sep and kind == "worst3":
        v, eta = _parse_numbers(rest, 2, "worst3")
        return three_point_spec(v, eta, n)
    if sep and kind == "worst4":
        v, kappa, q = _parse_numbers(rest, 3, "worst4")
        return four_point_spec(v, kappa, q, n)
    if text in PUBLISHED_MIXTURES:
        spec, _ = PUBLISHED_MIXTURES[text]
        return spec
    return parse_mixture(text)


@dataclass(frozen=True)
class SimulationConfig:
    """
    Everything that determines a simulation's output.

    Replication i draws its sample from the stream (seed, i), so results do
    not depend on how replications are scheduled.
    """
    source: Source
    n: int
    reps: int
    seed: int
    epsilon: float
    estimators: Tuple[EstimatorSpec, ...] = ()
    kind: InfluenceKind = InfluenceKind.NARROW
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if not isinstance(self.source, (MixtureSpec, DiscreteSpec)):
            raise ParameterError(f"unsupported source {type(self.source).__name__}")
        object.__setattr__(self, "n", check_count(self.n))
        object.__setattr__(self, "reps", check_count(self.reps, "reps"))
        object.__setattr__(self, "seed", check_seed(self.seed))
        epsilon = check_epsilon(self.epsilon)
        if epsilon >= 0.5:
            raise ParameterError("simulation epsilon must be below 1/2")
        object.__setattr__(self, "epsilon", epsilon)
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "kind", InfluenceKind(self.kind))

    @property
    def moments(self) -> MixtureMoments:
        return self.source.moments()

    def draw(self, index: int) -> Sample:
        return self.source.sample(self.n, make_generator(self.seed, index))
