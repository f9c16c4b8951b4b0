# steerkit/schemas/steering.py
import math
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from steerkit.steering.hierarchy import Certification, HierarchyLabel, Verdict
from steerkit.steering.radius import Direction, RadiusBracket


def _finite(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


class BracketResponse(BaseModel):
    """Bracket JSON for one steering direction."""
    direction: Direction
    lo: float = Field(..., ge=0.0, description="Certified lower bound on the critical radius")
    hi: Optional[float] = Field(None, description="Certified upper bound; null when no steering was found")
    eta: float = Field(..., gt=0.0, le=1.0)
    mesh_size: int
    lhs_residual: Optional[float] = Field(None, description="Residual of the LHS model behind lo")
    certificate_margin: Optional[float] = Field(None, description="Violation minus LHS bound behind hi")
    lo_x: float
    hi_x: Optional[float] = None
    status: str = "complete"

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "direction": "AtoB", "lo": 0.49, "hi": 0.56, "eta": 0.96, "mesh_size": 12,
                "lhs_residual": 0.0, "certificate_margin": 3e-4, "lo_x": 0.51, "hi_x": 0.56,
                "status": "complete",
            }
        }
    )

    @classmethod
    def from_bracket(cls, bracket: RadiusBracket) -> "BracketResponse":
        return cls(
            direction=bracket.direction,
            lo=bracket.lo,
            hi=_finite(bracket.hi),
            eta=bracket.eta,
            mesh_size=bracket.mesh_size,
            lhs_residual=None if bracket.lo_certificate is None else bracket.lo_certificate.residual,
            certificate_margin=None if bracket.hi_certificate is None else bracket.hi_certificate.margin,
            lo_x=bracket.lo_x,
            hi_x=_finite(bracket.hi_x),
            status=bracket.status,
        )


class VerdictResponse(BaseModel):
    steerable_ab: Certification
    steerable_ba: Certification
    label: HierarchyLabel
    min_pt_eigenvalue: float

    @classmethod
    def from_verdict(cls, verdict: Verdict) -> "VerdictResponse":
        return cls(
            steerable_ab=verdict.steerable_ab,
            steerable_ba=verdict.steerable_ba,
            label=verdict.label,
            min_pt_eigenvalue=verdict.min_pt_eigenvalue,
        )


class CertificationResponse(BaseModel):
    """Verdict plus both brackets of one state."""
    verdict: VerdictResponse
    brackets: List[BracketResponse]

    @classmethod
    def build(cls, verdict: Verdict, brackets: Dict[Direction, RadiusBracket]) -> "CertificationResponse":
        return cls(
            verdict=VerdictResponse.from_verdict(verdict),
            brackets=[BracketResponse.from_bracket(brackets[d]) for d in Direction if d in brackets],
        )
