"""
Validated parameter set shared by every closed-form bound.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.core.errors import ParameterError


class BoundQuery(BaseModel):
    """Sample size, variance, optional kurtosis, confidence level and optional lambda split."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    n: int = Field(..., ge=1, description="Sample size")
    v: float = Field(..., ge=0.0, allow_inf_nan=False, description="Variance")
    kappa: Optional[float] = Field(
        None,
        ge=1.0,
        allow_inf_nan=False,
        description="Kurtosis bound, required by kurtosis-aware bounds"
    )
    epsilon: float = Field(
        ...,
        gt=0.0,
        le=0.5,
        description="Bounds hold with probability at least 1 - 2 epsilon"
    )
    lambda_: Optional[float] = Field(
        None,
        alias="lambda",
        gt=0.0,
        lt=1.0,
        description="Confidence split of the kurtosis bound; default rule when absent"
    )

    @classmethod
    def build(cls, **values) -> "BoundQuery":
        """Construct, reporting validation failures as ParameterError."""
        try:
            return cls(**values)
        except ValidationError as e:
            raise ParameterError(_summarize(e)) from e

    def at(self, epsilon: float) -> "BoundQuery":
        """Same query at another confidence level."""
        return self.build(**{**self.model_dump(by_alias=True), "epsilon": epsilon})

    def require_kappa(self) -> float:
        if self.kappa is None:
            raise ParameterError("this bound needs a kurtosis bound kappa")
        return self.kappa


def _summarize(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(x) for x in item["loc"]) or "query"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)
