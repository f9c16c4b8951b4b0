# steerkit/schemas/experiment.py
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from steerkit.expsim.experiment import ExperimentReport
from steerkit.expsim.sampler import SamplerConfig
from steerkit.expsim.tomography import TomographyResult
from steerkit.schemas.density import DensityMatrixPayload
from steerkit.schemas.steering import BracketResponse, VerdictResponse
from steerkit.states import FamilyParams, RetrievedParams


class CountsSidecar(BaseModel):
    """Metadata stored next to a counts CSV."""
    duration_s: float = Field(..., gt=0.0, description="Accumulation time of the whole table")
    alpha: float = Field(1.0, gt=0.0, description="Source imbalance the data were taken with")
    seed: int = Field(0, ge=0)

    model_config = ConfigDict(
        extra="ignore",
        json_schema_extra={"example": {"duration_s": 20.0, "alpha": 1.106, "seed": 0}},
    )


class TomographyResponse(BaseModel):
    rho_hat: DensityMatrixPayload
    fidelity_to_target: Optional[float] = Field(None, ge=0.0, le=1.0)
    fidelity_to_nominal: Optional[float] = Field(None, ge=0.0, le=1.0)
    retrieved: RetrievedParams
    bootstrap_sigma_p: float = Field(..., ge=0.0)
    bootstrap_sigma_r: float = Field(..., ge=0.0)
    min_raw_eigenvalue: float

    @classmethod
    def from_result(cls, result: TomographyResult) -> "TomographyResponse":
        return cls(
            rho_hat=DensityMatrixPayload.from_density(result.rho_hat),
            fidelity_to_target=result.fidelity_to_target,
            fidelity_to_nominal=result.fidelity_to_nominal,
            retrieved=result.retrieved,
            bootstrap_sigma_p=result.bootstrap_sigma_p,
            bootstrap_sigma_r=result.bootstrap_sigma_r,
            min_raw_eigenvalue=result.min_raw_eigenvalue,
        )


class TomoReport(BaseModel):
    """Analysis of an external counts table."""
    total_counts: float
    duration_s: float
    tomography: TomographyResponse
    verdict: Optional[VerdictResponse] = None
    brackets: List[BracketResponse] = Field(default_factory=list)


class ExperimentResponse(BaseModel):
    config: SamplerConfig
    target: FamilyParams
    rate_hz: float
    efficiency: float
    class_frequencies: List[float]
    total_counts: float
    tomography: TomographyResponse
    verdict: Optional[VerdictResponse] = None
    brackets: List[BracketResponse] = Field(default_factory=list)
    resample_brackets: List[List[BracketResponse]] = Field(default_factory=list)

    @classmethod
    def from_report(cls, report: ExperimentReport) -> "ExperimentResponse":
        return cls(
            config=report.config,
            target=report.target,
            rate_hz=report.rate_hz,
            efficiency=report.efficiency,
            class_frequencies=[float(f) for f in report.class_frequencies],
            total_counts=report.counts.total,
            tomography=TomographyResponse.from_result(report.tomography),
            verdict=None if report.verdict is None else VerdictResponse.from_verdict(report.verdict),
            brackets=[BracketResponse.from_bracket(b) for b in report.brackets.values()],
            resample_brackets=[
                [BracketResponse.from_bracket(b) for b in resample.values()] for resample in report.resample_brackets
            ],
        )


class BatchResponse(BaseModel):
    reports: List[ExperimentResponse]
