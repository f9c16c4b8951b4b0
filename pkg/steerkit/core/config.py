# steerkit/core/config.py
from functools import lru_cache
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Execution
    THREADS: int = 0  # 0 means all available cores
    SEED: int = 0
    LOG_LEVEL: str = "INFO"

    # Certification defaults
    MESH_SIZE: int = 12
    BISECTION_STEPS: int = 20

    # Numerical tolerances, all in one place
    VALIDATION_TOL: float = 1e-9  # density-matrix validation slack
    FEASIBILITY_TOL: float = 1e-9  # phase-1 residual accepted as feasible
    PRICING_TOL: float = 1e-10  # reduced profit below which pricing stops
    CERTIFICATE_MARGIN: float = 1e-9  # minimum violation - lhs_bound
    MAX_LP_ROUNDS: int = 400
    COLUMNS_PER_ROUND: int = 24

    # Experiment simulation
    RATE_HZ: float = 40000.0
    EFFICIENCY: float = 0.172
    ALPHA: float = 1.106
    FRAMES: int = 800
    EXPOSURE_S: float = 0.02
    ACCUMULATION_S: float = 20.0
    BOOTSTRAP_VARIATIONS: int = 20

    class Config:
        env_file = ".env"
        env_prefix = "STEERKIT_"
        case_sensitive = True
        extra = "ignore"


@lru_cache()
def get_settings() -> Settings:
    return Settings()
