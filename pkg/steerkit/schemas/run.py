# steerkit/schemas/run.py
import os
from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from steerkit.core.config import get_settings

THREADS_ENV = "STEERKIT_THREADS"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class RunConfig(BaseModel):
    """Validated options shared by every command."""
    mesh_size: int = Field(12, ge=3, le=16, description="Directions in the Fibonacci measurement mesh")
    tol: float = Field(1e-9, gt=0.0, description="Phase-1 feasibility tolerance")
    bisection_steps: int = Field(20, ge=0)
    seed: int = Field(0, ge=0, le=2**64 - 1)
    threads: int = Field(0, ge=0, validate_default=True, description="Worker count, 0 for all cores")
    output_path: Optional[Path] = None
    format: Optional[OutputFormat] = None
    strict: bool = False
    validate_input: bool = True

    model_config = ConfigDict(frozen=True)

    @field_validator("threads", mode="before")
    @classmethod
    def threads_from_environment(cls, v):
        env = os.environ.get(THREADS_ENV)
        return int(env) if env not in (None, "") else v

    @property
    def n_jobs(self) -> int:
        """joblib worker count."""
        return -1 if self.threads == 0 else self.threads

    @classmethod
    def from_settings(cls, **overrides) -> "RunConfig":
        """Settings defaults with the non-None ``overrides`` applied."""
        settings = get_settings()
        values = {
            "mesh_size": settings.MESH_SIZE,
            "tol": settings.FEASIBILITY_TOL,
            "bisection_steps": settings.BISECTION_STEPS,
            "seed": settings.SEED,
            "threads": settings.THREADS,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
