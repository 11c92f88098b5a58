"""
Configuration module for the catoni command-line tool.
Loads and validates environment variables using Pydantic Settings.
"""

from functools import lru_cache
from pydantic_settings import BaseSettings
from pydantic import Field


class Settings(BaseSettings):
    """Tool settings loaded from CATONI_* environment variables."""

    # Simulation Configuration
    threads: int = Field(
        default=0,
        ge=0,
        description="Worker threads for simulations (0 = one per CPU)"
    )

    # Logging Configuration
    log_level: str = Field(
        default="WARNING",
        description="Log level for messages on standard error"
    )

    # Solver Configuration
    mean_tolerance: float = Field(
        default=1e-10,
        gt=0.0,
        description="Relative tolerance of the mean solver, scaled by 1 + max|Y|"
    )
    variance_tolerance: float = Field(
        default=1e-10,
        gt=0.0,
        description="Residual tolerance of the variance solver"
    )

    # Output Configuration
    float_digits: int = Field(
        default=17,
        ge=1,
        le=17,
        description="Significant digits of floats in CSV output"
    )

    class Config:
        env_prefix = "CATONI_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
