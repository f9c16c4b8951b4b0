# steerkit/steering/radius.py
"""
Two-sided brackets for the critical radius

    R_AB(rho) = max {x >= 0 : rho^(x) is unsteerable from A to B},

where rho^(x) = x rho + (1 - x) I/2 ⊗ rho_B depolarizes the steering party.

Bisection runs over x in [0, 1/eta]. The lower side comes from explicit LHS
models on the mesh, lifted to all projective measurements by the shrinking
factor (lo = eta * x_feasible). The upper side is the smallest x whose
assemblage violates a verified steering inequality.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from steerkit.core.config import get_settings
from steerkit.core.exceptions import SolverError
from steerkit.qmat import Operator, Party, as_operator, swap_operator
from steerkit.states import depolarize_alice
from steerkit.steering.assemblage import Assemblage, assemblage
from steerkit.steering.lhs import LhsModel, SteeringCertificate, lhs_feasible, verify_certificate
from steerkit.steering.mesh import DirectionMesh, fibonacci_mesh

logger = logging.getLogger(__name__)


class Direction(str, Enum):
    """Steering direction: who measures (first letter) and who is steered."""
    A_TO_B = "AtoB"
    B_TO_A = "BtoA"


class ProbeKind(str, Enum):
    FEASIBLE = "feasible"
    STEERABLE = "steerable"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Probe:
    x: float
    kind: ProbeKind
    model: Optional[LhsModel] = None
    certificate: Optional[SteeringCertificate] = None


@dataclass(frozen=True)
class RadiusBracket:
    direction: Direction
    lo: float
    hi: float  # math.inf when no steering was certified
    mesh_size: int
    eta: float
    lo_certificate: Optional[LhsModel]
    hi_certificate: Optional[SteeringCertificate]
    lo_x: float
    hi_x: float
    status: str = "complete"

    @property
    def steerable(self) -> bool:
        """Certified steerable: the bracket lies entirely below 1."""
        return self.hi < 1

    @property
    def unsteerable(self) -> bool:
        """Certified unsteerable for all projective measurements."""
        return self.lo >= 1


def oriented(rho: Operator, direction: Direction) -> np.ndarray:
    """Operator with the steering party in the first tensor slot."""
    arr = as_operator(rho, dims=(4,))
    return swap_operator(arr) if Direction(direction) is Direction.B_TO_A else arr


def depolarized_assemblage(chi: np.ndarray, x: float, mesh: DirectionMesh) -> Assemblage:
    return assemblage(depolarize_alice(chi, x), mesh, Party.A)


def probe(chi: np.ndarray, x: float, mesh: DirectionMesh, tol: Optional[float] = None) -> Probe:
    """Run the LHS feasibility test on chi^(x) and classify the outcome."""
    asm = depolarized_assemblage(chi, x, mesh)
    try:
        result = lhs_feasible(asm, tol)
    except SolverError as e:
        logger.warning(f"Probe at x={x:.6f} inconclusive: {e}")
        return Probe(x, ProbeKind.UNKNOWN)
    if result.feasible:
        return Probe(x, ProbeKind.FEASIBLE, model=result.model)
    cert = result.certificate
    if cert is not None and verify_certificate(cert, asm) >= get_settings().CERTIFICATE_MARGIN:
        return Probe(x, ProbeKind.STEERABLE, certificate=cert)
    return Probe(x, ProbeKind.INFEASIBLE)


def critical_radius_bracket(
    rho: Operator,
    direction: Direction = Direction.A_TO_B,
    mesh: Optional[DirectionMesh] = None,
    bisection_steps: Optional[int] = None,
    tol: Optional[float] = None,
) -> RadiusBracket:
    """
    Certified interval [lo, hi] containing the critical radius in ``direction``.

    Args:
        rho: Two-qubit state (any Hermitian unit-trace operator is accepted).
        direction: AtoB brackets R_AB, BtoA brackets R_BA.
        mesh: Measurement axes; defaults to the configured Fibonacci mesh.
        bisection_steps: Number of bisection probes after the end points.
        tol: Phase-1 feasibility tolerance.

    Returns:
        RadiusBracket with lo <= R <= hi. An inconclusive probe stops the
        search early and marks the bracket as ``widened``; it never narrows it.
    """
    settings = get_settings()
    mesh = mesh or fibonacci_mesh(settings.MESH_SIZE)
    steps = settings.BISECTION_STEPS if bisection_steps is None else bisection_steps
    direction = Direction(direction)
    eta = mesh.eta
    x_cap = 1.0 / eta
    chi = oriented(rho, direction)

    top = probe(chi, x_cap, mesh, tol)
    if top.kind is ProbeKind.FEASIBLE:
        logger.info(f"{direction.value}: LHS model at x_cap={x_cap:.6f}, state unsteerable")
        # eta * x_cap is 1 up to rounding
        return RadiusBracket(
            direction=direction, lo=1.0, hi=math.inf, mesh_size=mesh.size, eta=eta,
            lo_certificate=top.model, hi_certificate=None, lo_x=x_cap, hi_x=math.inf,
        )

    status = "complete" if top.kind is not ProbeKind.UNKNOWN else "widened"
    hi_x, hi_cert = (x_cap, top.certificate) if top.kind is ProbeKind.STEERABLE else (math.inf, None)

    bottom = probe(chi, 0.0, mesh, tol)
    lo_x, lo_model = 0.0, bottom.model
    if bottom.kind is not ProbeKind.FEASIBLE:
        status = "widened"

    upper = x_cap
    for step in range(steps):
        mid = (lo_x + upper) / 2
        result = probe(chi, mid, mesh, tol)
        logger.debug(f"{direction.value} step {step}: x={mid:.8f} -> {result.kind.value}")
        if result.kind is ProbeKind.FEASIBLE:
            lo_x, lo_model = mid, result.model
        elif result.kind is ProbeKind.STEERABLE:
            upper = mid
            hi_x, hi_cert = mid, result.certificate
        elif result.kind is ProbeKind.INFEASIBLE:
            upper = mid
        else:
            status = "widened"
            break

    bracket = RadiusBracket(
        direction=direction, lo=eta * lo_x, hi=hi_x, mesh_size=mesh.size, eta=eta,
        lo_certificate=lo_model, hi_certificate=hi_cert, lo_x=lo_x, hi_x=hi_x, status=status,
    )
    logger.info(f"{direction.value}: R in [{bracket.lo:.6f}, {bracket.hi:.6f}] (eta={eta:.6f}, {status})")
    return bracket
