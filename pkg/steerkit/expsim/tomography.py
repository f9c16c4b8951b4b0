# steerkit/expsim/tomography.py
"""
Over-complete two-qubit tomography: linear inversion of the 36 outcome
frequencies, projection onto physical states and Poisson bootstrap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from joblib import Parallel, delayed

from steerkit.core.config import get_settings
from steerkit.core.exceptions import EmptyCounts, InputError
from steerkit.core.rng import BOOTSTRAP_STREAM, stream
from steerkit.expsim.counts import CountsTable
from steerkit.qmat import IDENTITY_2, PAULIS, DensityMatrix, Operator, fidelity, hermitian_eig
from steerkit.states import RetrievedParams, retrieve_params

logger = logging.getLogger(__name__)

_BASIS = (IDENTITY_2,) + PAULIS
# Local Pauli (1..3) measured by each outcome and the outcome sign
_AXIS = np.repeat(np.arange(1, 4), 2)
_SIGN = np.tile([1.0, -1.0], 3)


def _design() -> np.ndarray:
    """
    Rows: outcome pairs (a, b). Columns: the 15 Pauli coefficients c_ij, (i, j) != (0, 0).

    4 tr[(P_a ⊗ P_b) rho] - 1 = s_a c_{i0} + s_b c_{0j} + s_a s_b c_{ij}.
    """
    columns = [(i, j) for i in range(4) for j in range(4) if (i, j) != (0, 0)]
    design = np.zeros((36, 15))
    for a in range(6):
        for b in range(6):
            row = 6 * a + b
            i, j = _AXIS[a], _AXIS[b]
            design[row, columns.index((i, 0))] = _SIGN[a]
            design[row, columns.index((0, j))] = _SIGN[b]
            design[row, columns.index((i, j))] = _SIGN[a] * _SIGN[b]
    return design


DESIGN = _design()
PAULI_PRODUCTS = np.array([np.kron(_BASIS[i], _BASIS[j]) for i in range(4) for j in range(4)])


def tomo_linear_inversion(counts: CountsTable) -> np.ndarray:
    """
    Least-squares Pauli coefficients from the basis-normalized frequencies.

    Settings without counts are left out of the fit. Returns a Hermitian
    unit-trace matrix that need not be positive.
    """
    if counts.total <= 0:
        raise EmptyCounts("Counts table holds no coincidences")
    observed = np.repeat(np.repeat(counts.basis_totals() > 0, 2, axis=0), 2, axis=1).ravel()
    rhs = 4 * counts.frequencies().ravel() - 1
    coeffs, *_ = np.linalg.lstsq(DESIGN[observed], rhs[observed], rcond=None)
    c = np.concatenate(([1.0], coeffs))
    mat = np.einsum("k,kij->ij", c, PAULI_PRODUCTS) / 4
    return (mat + mat.conj().T) / 2


def project_to_physical(h: Operator) -> DensityMatrix:
    """
    Closest density matrix to ``h`` in Frobenius norm.

    The trace is first set to one by an even shift of the spectrum. Then the
    most negative eigenvalue is zeroed and its mass spread over the others,
    repeatedly, until the spectrum is nonnegative.

    Example:
        diag(0.6, 0.6, 0, -0.2) -> diag(0.5, 0.5, 0, 0)
    """
    values, vectors = hermitian_eig(h, get_settings().VALIDATION_TOL)
    lam = values + (1.0 - values.sum()) / values.size
    mass, keep = 0.0, lam.size
    while keep > 0 and lam[keep - 1] + mass / keep < 0:
        mass += lam[keep - 1]
        lam[keep - 1] = 0.0
        keep -= 1
    lam[:keep] += mass / keep
    mat = (vectors * lam) @ vectors.conj().T
    return DensityMatrix((mat + mat.conj().T) / 2)


def reconstruct(counts: CountsTable) -> DensityMatrix:
    return project_to_physical(tomo_linear_inversion(counts))


@dataclass(frozen=True)
class BootstrapResult:
    sigma_p: float
    sigma_r: float
    per_resample: List[RetrievedParams] = field(default_factory=list)


def _resample(counts: CountsTable, seed: int, index: int) -> Optional[RetrievedParams]:
    rng = stream(seed, BOOTSTRAP_STREAM, index)
    draw = CountsTable(rng.poisson(counts.counts).astype(float), counts.duration_s)
    if draw.total <= 0:
        return None
    return retrieve_params(reconstruct(draw))


def bootstrap(counts: CountsTable, variations: Optional[int] = None, seed: int = 0,
              n_jobs: int = 1) -> BootstrapResult:
    """
    Poisson bootstrap of the full analysis chain.

    Each cell is redrawn as Poisson(observed count) from its own seeded stream,
    then inverted, projected and fitted. Sigmas are sample standard deviations.
    """
    variations = get_settings().BOOTSTRAP_VARIATIONS if variations is None else variations
    if variations < 2:
        raise InputError(f"Bootstrap needs at least 2 variations, got {variations}")
    if counts.total <= 0:
        raise EmptyCounts("Counts table holds no coincidences")
    jobs = -1 if n_jobs == 0 else n_jobs
    results = Parallel(n_jobs=jobs)(delayed(_resample)(counts, seed, i) for i in range(variations))
    fitted = [r for r in results if r is not None]
    if len(fitted) < len(results):
        logger.warning(f"{len(results) - len(fitted)} bootstrap resamples were empty and skipped")
    if len(fitted) < 2:
        return BootstrapResult(0.0, 0.0, fitted)
    ps = np.array([r.p for r in fitted])
    rs = np.array([r.r for r in fitted])
    return BootstrapResult(float(np.std(ps, ddof=1)), float(np.std(rs, ddof=1)), fitted)


@dataclass(frozen=True)
class TomographyResult:
    rho_hat: DensityMatrix
    fidelity_to_target: Optional[float]
    retrieved: RetrievedParams
    bootstrap_sigma_p: float
    bootstrap_sigma_r: float
    fidelity_to_nominal: Optional[float] = None
    min_raw_eigenvalue: float = 0.0


def analyze_counts(
    counts: CountsTable,
    target: Optional[Operator] = None,
    nominal: Optional[Operator] = None,
    variations: Optional[int] = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> TomographyResult:
    """Reconstruct, fit the family parameters and bootstrap their uncertainty."""
    raw = tomo_linear_inversion(counts)
    rho_hat = project_to_physical(raw)
    retrieved = retrieve_params(rho_hat)
    boot = bootstrap(counts, variations, seed, n_jobs)
    result = TomographyResult(
        rho_hat=rho_hat,
        fidelity_to_target=None if target is None else fidelity(rho_hat, target),
        retrieved=retrieved,
        bootstrap_sigma_p=boot.sigma_p,
        bootstrap_sigma_r=boot.sigma_r,
        fidelity_to_nominal=None if nominal is None else fidelity(rho_hat, nominal),
        min_raw_eigenvalue=float(hermitian_eig(raw)[0][-1]),
    )
    logger.info(
        f"Retrieved p={retrieved.p:.4f}±{boot.sigma_p:.4f}, r={retrieved.r:.4f}±{boot.sigma_r:.4f}"
    )
    return result
