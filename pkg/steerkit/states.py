# steerkit/states.py
"""
State families used throughout steerkit.

The two-parameter family mixes the singlet-like state |Psi+> with a product
state biased on Alice's side:

    rho(p, r) = p |Psi+><Psi+| + (1 - p) rho_r ⊗ I/2,   rho_r = (I + r sigma_z) / 2.

The theta family mixes cos(theta)|00> + sin(theta)|11> with I/2 ⊗ rho_B and is
used when reanalysing external data sets.
"""

from __future__ import annotations

import logging
import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from steerkit.qmat import (
    DEFAULT_TOLERANCE,
    IDENTITY_2,
    SIGMA_Z,
    DensityMatrix,
    Operator,
    Party,
    as_operator,
    hermitian_eig,
    partial_transpose,
    projector,
    ptrace,
    random_state,
    tensor,
)

logger = logging.getLogger(__name__)

PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)
PSI_PLUS_PROJECTOR = projector(PSI_PLUS)
KET_0_PROJECTOR = np.array([[1, 0], [0, 0]], dtype=complex)

# Affine basis for the family: rho(p, q) = I/4 + p*M1 + q*M2 with q = (1 - p) r
FAMILY_M1 = PSI_PLUS_PROJECTOR - np.eye(4) / 4
FAMILY_M2 = tensor(KET_0_PROJECTOR, IDENTITY_2 / 2) - np.eye(4) / 4

SEPARABILITY_TOL = 1e-10
DEGENERATE_P = 1 - 1e-9


class FamilyParams(BaseModel):
    """Parameters (p, r) of the two-parameter family."""
    p: float = Field(..., ge=0.0, le=1.0, description="Weight of |Psi+><Psi+|")
    r: float = Field(..., ge=0.0, le=1.0, description="Bias of rho_r along sigma_z")

    model_config = ConfigDict(frozen=True)


class ThetaFamilyParams(BaseModel):
    """Parameters (theta, p) of the theta family."""
    theta: float = Field(..., ge=0.0, le=math.pi / 4, description="Entanglement angle")
    p: float = Field(..., ge=0.0, le=1.0, description="Weight of |theta><theta|")

    model_config = ConfigDict(frozen=True)


class RetrievedParams(BaseModel):
    """Closest family parameters to a given state, in Frobenius distance."""
    p: float
    r: float
    residual: float = Field(..., ge=0.0)
    clamped: bool = False
    degenerate: bool = False

    model_config = ConfigDict(frozen=True)


def rho_r(r: float) -> np.ndarray:
    return (IDENTITY_2 + r * SIGMA_Z) / 2


def family_state(params: FamilyParams) -> DensityMatrix:
    """
    Build rho(p, r) = p |Psi+><Psi+| + (1 - p) rho_r ⊗ I/2.

    Example:
        >>> family_state(FamilyParams(p=0.0, r=0.0)).mat.real.diagonal()
        array([0.25, 0.25, 0.25, 0.25])
    """
    product = tensor(rho_r(params.r), IDENTITY_2 / 2)
    return DensityMatrix(params.p * PSI_PLUS_PROJECTOR + (1 - params.p) * product)


def depolarize_alice(rho: Operator, x: float) -> np.ndarray:
    """
    rho^(x) = x rho + (1 - x) I/2 ⊗ rho_B.

    Values x > 1 are allowed; the result is then Hermitian but possibly not
    positive semidefinite, which is why a plain array is returned. Use
    ``is_psd`` when the caller needs to know.
    """
    arr = as_operator(rho, dims=(4,))
    rho_b = ptrace(arr, Party.A)
    return x * arr + (1 - x) * tensor(IDENTITY_2 / 2, rho_b)


def is_psd(m: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> bool:
    return bool(np.linalg.eigvalsh((m + m.conj().T) / 2)[0] >= -tol)


def _hs(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.real(np.trace(x.conj().T @ y)))


def retrieve_params(rho: Operator) -> RetrievedParams:
    """
    Closest (p, r) to ``rho`` in Frobenius distance.

    The family is affine in (p, q) with q = (1 - p) r, so the unconstrained
    optimum solves the 2x2 normal equations over FAMILY_M1, FAMILY_M2. The
    solution is clamped into [0, 1]^2 and the residual is measured against
    the clamped reconstruction.
    """
    arr = as_operator(rho, dims=(4,))
    delta = arr - np.eye(4) / 4
    gram = np.array([
        [_hs(FAMILY_M1, FAMILY_M1), _hs(FAMILY_M1, FAMILY_M2)],
        [_hs(FAMILY_M2, FAMILY_M1), _hs(FAMILY_M2, FAMILY_M2)],
    ])
    rhs = np.array([_hs(FAMILY_M1, delta), _hs(FAMILY_M2, delta)])
    p, q = np.linalg.solve(gram, rhs)

    degenerate = p >= DEGENERATE_P
    r = 0.0 if degenerate else q / (1 - p)
    p_c, r_c = float(np.clip(p, 0.0, 1.0)), float(np.clip(r, 0.0, 1.0))
    clamped = not (np.isclose(p_c, p, atol=1e-12) and np.isclose(r_c, r, atol=1e-12))
    if clamped:
        logger.warning(f"Retrieved parameters (p={p:.6f}, r={r:.6f}) clamped into [0, 1]")

    fitted = family_state(FamilyParams(p=p_c, r=r_c)).mat
    residual = float(np.linalg.norm(arr - fitted))
    return RetrievedParams(p=p_c, r=r_c, residual=residual, clamped=clamped, degenerate=bool(degenerate))


def min_pt_eigenvalue(rho: Operator) -> float:
    vals, _ = hermitian_eig(partial_transpose(rho, Party.B))
    return float(vals[-1])


def is_separable_ppt(rho: Operator) -> Tuple[bool, float]:
    """PPT test, exact for two qubits: (separable, minimum partial-transpose eigenvalue)."""
    lam = min_pt_eigenvalue(rho)
    return lam >= -SEPARABILITY_TOL, lam


def theta_ket(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), 0, 0, math.sin(theta)], dtype=complex)


def theta_state(params: ThetaFamilyParams) -> DensityMatrix:
    """rho = p |theta><theta| + (1 - p) I/2 ⊗ rho_B with rho_B = Tr_A |theta><theta|."""
    pure = projector(theta_ket(params.theta))
    rho_b = ptrace(pure, Party.A)
    return DensityMatrix(params.p * pure + (1 - params.p) * tensor(IDENTITY_2 / 2, rho_b))


def bowles_one_way_predicate(params: ThetaFamilyParams) -> bool:
    """
    Sufficient condition for A-to-B steerable but B-to-A unsteerable states
    of the theta family: p > 1/2 and cos^2(2 theta) >= (2p - 1) / ((2 - p) p^3).
    """
    p = params.p
    if p <= 0.5:
        return False
    return math.cos(2 * params.theta) ** 2 >= (2 * p - 1) / ((2 - p) * p ** 3)


def random_separable(rng: np.random.Generator, terms: int = 4) -> DensityMatrix:
    """Random convex mixture of ``terms`` product states."""
    weights = rng.dirichlet(np.ones(terms))
    out = np.zeros((4, 4), dtype=complex)
    for w in weights:
        out += w * tensor(random_state(rng, 2).mat, random_state(rng, 2).mat)
    return DensityMatrix(out)
