"""
Pydantic models validating command-line flags before any computation.
"""

from typing import List, Optional
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.core.errors import ParameterError
from src.distributions.sampling import MAX_SEED
from src.estimators.influence import InfluenceKind
from src.estimators.mean_catoni import MeanMethod
from src.estimators.variance_blocks import XiMode


class CommandRequest(BaseModel):
    """Base for subcommand requests; flags arrive as argparse attributes."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    output: Optional[str] = Field(None, description="Output CSV path (standard output when omitted)")

    @classmethod
    def from_args(cls, args) -> "CommandRequest":
        """Validate an argparse namespace, turning pydantic errors into ParameterError."""
        values = {name: getattr(args, name) for name in cls.model_fields if hasattr(args, name)}
        try:
            return cls(**values)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc']) or 'flags'}: {err['msg']}"
                for err in e.errors()
            )
            raise ParameterError(f"invalid flags: {problems}") from e


class MomentsRequest(CommandRequest):
    """Request model for the moments command."""
    mixture: str = Field(..., description="Mixture spec w:mu:sd,... or a published mixture name", min_length=1)


class EstimateMeanRequest(CommandRequest):
    """Request model for the estimate-mean command."""
    input: str = Field(..., description="Data file, one number per line", min_length=1)
    method: MeanMethod = Field(..., description="Estimator recipe")
    epsilon: float = Field(..., description="Interval holds with probability 1 - 2 epsilon", gt=0.0, le=0.5)
    variance: Optional[float] = Field(None, description="Known variance bound", gt=0.0)
    kappa_max: Optional[float] = Field(None, description="Kurtosis upper bound", ge=1.0)
    grid: Optional[str] = Field(None, description="Geometric variance grid V:rho:s")
    psi: InfluenceKind = Field(default=InfluenceKind.NARROW, description="Influence function")

    @model_validator(mode="after")
    def check_method_flags(self):
        if self.method in (MeanMethod.KNOWN_VARIANCE, MeanMethod.EPS_FREE) and self.variance is None:
            raise ValueError(f"method {self.method.value} needs --variance")
        return self


class EstimateVarianceRequest(CommandRequest):
    """Request model for the estimate-variance command."""
    input: str = Field(..., description="Data file, one number per line", min_length=1)
    kappa_max: float = Field(..., description="Kurtosis upper bound", ge=1.0)
    epsilon1: float = Field(..., description="Log-interval holds with probability 1 - 2 epsilon1", gt=0.0, lt=1.0)
    p: Optional[int] = Field(None, description="Block size", ge=2)
    xi: Optional[XiMode] = Field(None, description="xi bound; tight with simple fallback when omitted")
    psi: InfluenceKind = Field(default=InfluenceKind.NARROW, description="Influence function")


class BoundsRequest(CommandRequest):
    """Request model for the bounds command."""
    n: int = Field(..., description="Sample size", ge=1)
    v: float = Field(..., description="Variance", gt=0.0)
    kappa: Optional[float] = Field(None, description="Kurtosis bound", ge=1.0)
    eps_grid: str = Field(..., description="Log-spaced epsilon grid start:stop:count", min_length=1)
    grid: Optional[str] = Field(None, description="Variance grid V:rho:s for the adaptive bound")
    lambda_: Optional[float] = Field(None, alias="lambda", description="Confidence split of the kurtosis bound", gt=0.0, lt=1.0)
    bounds: Optional[List[str]] = Field(None, description="Subset of bounds to tabulate")


class SimulateRequest(CommandRequest):
    """Request model for the simulate command."""
    source: str = Field(..., description="Mixture spec, published name, worst3:v,eta or worst4:v,kappa,q", min_length=1)
    n: int = Field(..., description="Sample size", ge=1)
    reps: int = Field(..., description="Number of replications", ge=1)
    seed: int = Field(..., description="64-bit seed", ge=0, le=MAX_SEED)
    epsilon: float = Field(..., description="Confidence parameter", gt=0.0, lt=0.5)
    estimators: Optional[str] = Field(None, description="Comma-separated estimator descriptors")
    coverage: Optional[str] = Field(None, description="Interval method whose coverage is measured")
    psi: InfluenceKind = Field(default=InfluenceKind.NARROW, description="Influence function")
    threads: Optional[int] = Field(None, description="Worker threads, overrides CATONI_THREADS", ge=0)

    @model_validator(mode="after")
    def check_output_kind(self):
        if self.estimators is None and self.coverage is None:
            raise ValueError("give --estimators or --coverage")
        return self
