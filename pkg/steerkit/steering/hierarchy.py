# steerkit/steering/hierarchy.py
"""
Steering-hierarchy classification of two-qubit states and region scans.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, List, Sequence

from joblib import Parallel, delayed
from tqdm import tqdm

from steerkit.core.exceptions import CertificateNotFound, SolverError
from steerkit.qmat import Operator
from steerkit.states import FamilyParams, family_state, is_separable_ppt
from steerkit.steering.lhs import lhs_feasible, steering_certificate
from steerkit.steering.mesh import DirectionMesh
from steerkit.steering.radius import Direction, depolarized_assemblage, oriented

logger = logging.getLogger(__name__)

REGION_HEADER = ("p", "r", "verdict_ab", "verdict_ba", "label")


class Certification(str, Enum):
    CERTIFIED_STEERABLE = "CERTIFIED_STEERABLE"
    CERTIFIED_UNSTEERABLE = "CERTIFIED_UNSTEERABLE"
    INDETERMINATE = "INDETERMINATE"

    @property
    def token(self) -> str:
        """Spelling used in region CSV files."""
        return {
            Certification.CERTIFIED_STEERABLE: "STEERABLE",
            Certification.CERTIFIED_UNSTEERABLE: "UNSTEERABLE",
            Certification.INDETERMINATE: "INDETERMINATE",
        }[self]


class HierarchyLabel(str, Enum):
    SEPARABLE = "SEPARABLE"
    TWO_WAY_UNSTEERABLE = "TWO_WAY_UNSTEERABLE"
    ONE_WAY_A_TO_B = "ONE_WAY_A_TO_B"
    ONE_WAY_B_TO_A = "ONE_WAY_B_TO_A"
    TWO_WAY_STEERABLE = "TWO_WAY_STEERABLE"
    INDETERMINATE = "INDETERMINATE"


_LABELS = {
    (Certification.CERTIFIED_STEERABLE, Certification.CERTIFIED_STEERABLE): HierarchyLabel.TWO_WAY_STEERABLE,
    (Certification.CERTIFIED_STEERABLE, Certification.CERTIFIED_UNSTEERABLE): HierarchyLabel.ONE_WAY_A_TO_B,
    (Certification.CERTIFIED_UNSTEERABLE, Certification.CERTIFIED_STEERABLE): HierarchyLabel.ONE_WAY_B_TO_A,
    (Certification.CERTIFIED_UNSTEERABLE, Certification.CERTIFIED_UNSTEERABLE): HierarchyLabel.TWO_WAY_UNSTEERABLE,
}


@dataclass(frozen=True)
class Verdict:
    steerable_ab: Certification
    steerable_ba: Certification
    label: HierarchyLabel
    min_pt_eigenvalue: float

    @classmethod
    def assemble(cls, ab: Certification, ba: Certification, separable: bool, min_pt: float) -> "Verdict":
        if separable:
            return cls(Certification.CERTIFIED_UNSTEERABLE, Certification.CERTIFIED_UNSTEERABLE,
                       HierarchyLabel.SEPARABLE, min_pt)
        return cls(ab, ba, _LABELS.get((ab, ba), HierarchyLabel.INDETERMINATE), min_pt)


def certify_direction(rho: Operator, direction: Direction, mesh: DirectionMesh) -> Certification:
    """Steerable if rho itself violates a verified inequality, unsteerable if rho^(1/eta) is LHS."""
    chi = oriented(rho, direction)
    try:
        steering_certificate(depolarized_assemblage(chi, 1.0, mesh))
        return Certification.CERTIFIED_STEERABLE
    except CertificateNotFound:
        pass
    except SolverError as e:
        logger.warning(f"{Direction(direction).value}: certificate search inconclusive ({e})")

    try:
        result = lhs_feasible(depolarized_assemblage(chi, 1.0 / mesh.eta, mesh))
    except SolverError as e:
        logger.warning(f"{Direction(direction).value}: LHS search inconclusive ({e})")
        return Certification.INDETERMINATE
    if result.feasible:
        return Certification.CERTIFIED_UNSTEERABLE
    return Certification.INDETERMINATE


def classify(rho: Operator, mesh: DirectionMesh, n_jobs: int = 1) -> Verdict:
    """
    Place ``rho`` in the steering hierarchy.

    PPT comes first: separable states are unsteerable both ways and skip the
    LP entirely. Otherwise each direction is certified independently.
    """
    separable, min_pt = is_separable_ppt(rho)
    if separable:
        return Verdict.assemble(Certification.CERTIFIED_UNSTEERABLE, Certification.CERTIFIED_UNSTEERABLE,
                                True, min_pt)
    if n_jobs == 1:
        ab, ba = (certify_direction(rho, d, mesh) for d in (Direction.A_TO_B, Direction.B_TO_A))
    else:
        ab, ba = Parallel(n_jobs=min(2, n_jobs) if n_jobs > 0 else 2, prefer="threads")(
            delayed(certify_direction)(rho, d, mesh) for d in (Direction.A_TO_B, Direction.B_TO_A)
        )
    verdict = Verdict.assemble(ab, ba, False, min_pt)
    if verdict.label is HierarchyLabel.INDETERMINATE:
        logger.warning(f"Indeterminate verdict ({ab.value}, {ba.value})")
    return verdict


@dataclass(frozen=True)
class RegionCell:
    p: float
    r: float
    verdict: Verdict


def _classify_cell(p: float, r: float, mesh: DirectionMesh) -> RegionCell:
    return RegionCell(p, r, classify(family_state(FamilyParams(p=p, r=r)), mesh))


def region_scan(
    p_grid: Sequence[float],
    r_grid: Sequence[float],
    mesh: DirectionMesh,
    n_jobs: int = 1,
    progress: bool = False,
) -> List[RegionCell]:
    """Classify the family state at every (p, r); rows ordered by p, then r."""
    points = [(float(p), float(r)) for p in p_grid for r in r_grid]
    for p, r in points:
        FamilyParams(p=p, r=r)
    tasks = tqdm(points, desc="region", disable=not progress, leave=False)
    jobs = -1 if n_jobs == 0 else n_jobs
    return Parallel(n_jobs=jobs)(delayed(_classify_cell)(p, r, mesh) for p, r in tasks)


def format_float(value: float) -> str:
    return f"{value:.6g}" if math.isfinite(value) else ""


def write_region_csv(cells: Iterable[RegionCell], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(REGION_HEADER)
    for cell in cells:
        v = cell.verdict
        writer.writerow([format_float(cell.p), format_float(cell.r),
                         v.steerable_ab.token, v.steerable_ba.token, v.label.value])
