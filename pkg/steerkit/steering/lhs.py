# steerkit/steering/lhs.py
"""
Local-hidden-state feasibility by column generation.

The LHS question for an assemblage with N settings is the linear feasibility
problem

    sum_j c_j D_j(+|k) omega_j = sigma_{+|k}   (k = 1..N)
    sum_j c_j omega_j          = sigma_B
    c_j >= 0

over columns j = (deterministic strategy, pure hidden state on the Bloch
sphere). Every 2x2 Hermitian constraint is written in Pauli coordinates
(tr H, tr H.sx, tr H.sy, tr H.sz), which gives 4N + 4 real rows.

The restricted master problem is the phase-1 LP (minimize the artificial
slack) solved with HiGHS. Its equality duals y price every column in closed
form: for a strategy the best hidden state is the unit vector along c(y),
worth c0 + |c|. All 2^N strategies are enumerated, so pricing is exact and
an infeasibility verdict ships with a steering inequality whose LHS bound is
recomputed from scratch by ``lhs_bound``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from steerkit.core.config import get_settings
from steerkit.core.exceptions import CertificateNotFound, IterationLimit, SolverError
from steerkit.qmat import IDENTITY_2, PAULIS, pauli_coordinates, qubit_from_bloch
from steerkit.steering.assemblage import MINUS, PLUS, Assemblage

logger = logging.getLogger(__name__)

MAX_POOL = 4000


@lru_cache(maxsize=None)
def strategy_table(n: int) -> np.ndarray:
    """Row s, column k: 1.0 when strategy s answers + to setting k."""
    codes = np.arange(2 ** n)
    table = ((codes[:, None] >> np.arange(n)) & 1).astype(float)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class LhsColumn:
    strategy: int  # bit k set means outcome + for setting k
    bloch: np.ndarray
    weight: float

    def answers_plus(self, k: int) -> bool:
        return bool((self.strategy >> k) & 1)


@dataclass(frozen=True)
class LhsModel:
    """Explicit LHS decomposition of an assemblage."""
    columns: Tuple[LhsColumn, ...]
    residual: float

    def reconstruct(self, n_settings: int) -> np.ndarray:
        blocks = np.zeros((n_settings, 2, 2, 2), dtype=complex)
        marginal = np.zeros((2, 2), dtype=complex)
        for col in self.columns:
            omega = col.weight * qubit_from_bloch(col.bloch)
            marginal += omega
            for k in range(n_settings):
                if col.answers_plus(k):
                    blocks[k, PLUS] += omega
        blocks[:, MINUS] = marginal - blocks[:, PLUS]
        return blocks


@dataclass(frozen=True)
class SteeringCertificate:
    """
    Linear steering functional F_{a|k} with its verified LHS bound.

    Any LHS assemblage satisfies sum tr(F_{a|k} sigma_{a|k}) <= lhs_bound,
    so violation > lhs_bound proves steering.
    """
    functionals: np.ndarray
    lhs_bound: float
    violation: float

    @property
    def margin(self) -> float:
        return self.violation - self.lhs_bound


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    model: Optional[LhsModel]
    dual: Optional[np.ndarray]
    certificate: Optional[SteeringCertificate]
    phase1_value: float
    rounds: int


def _operator(v: np.ndarray) -> np.ndarray:
    """Operator v0 I + v.sigma, whose trace pairing reproduces v . pauli_coordinates."""
    return v[0] * IDENTITY_2 + sum(v[i + 1] * s for i, s in enumerate(PAULIS))


def lhs_bound(functionals: np.ndarray) -> float:
    """
    max over deterministic strategies of lambda_max(sum_k F_{lambda(k)|k}).

    Each F is expanded as f0 I + f.sigma, and lambda_max(c0 I + c.sigma) = c0 + |c|.
    """
    f = np.asarray(functionals, dtype=complex)
    n = f.shape[0]
    coeffs = np.empty((n, 2, 4))
    for k in range(n):
        for a in (PLUS, MINUS):
            coeffs[k, a] = pauli_coordinates(f[k, a]) / 2
    table = strategy_table(n)
    total = table @ coeffs[:, PLUS] + (1 - table) @ coeffs[:, MINUS]
    return float(np.max(total[:, 0] + np.linalg.norm(total[:, 1:], axis=1)))


def violation(functionals: np.ndarray, asm: Assemblage) -> float:
    return float(np.real(np.einsum("kaij,kaji->", functionals, asm.blocks)))


def verify_certificate(cert: SteeringCertificate, asm: Assemblage) -> float:
    """Recompute the margin of ``cert`` against ``asm`` from the raw functionals."""
    return violation(cert.functionals, asm) - lhs_bound(cert.functionals)


def certificate_from_dual(y: np.ndarray, asm: Assemblage) -> SteeringCertificate:
    n = asm.n_settings
    y_k = y[: 4 * n].reshape(n, 4)
    shared = _operator(y[4 * n:]) / n
    functionals = np.empty((n, 2, 2, 2), dtype=complex)
    for k in range(n):
        functionals[k, PLUS] = _operator(y_k[k]) + shared
        functionals[k, MINUS] = shared
    functionals.setflags(write=False)
    return SteeringCertificate(
        functionals=functionals,
        lhs_bound=lhs_bound(functionals),
        violation=violation(functionals, asm),
    )


def target_vector(asm: Assemblage) -> np.ndarray:
    rows = [pauli_coordinates(asm.blocks[k, PLUS]) for k in range(asm.n_settings)]
    rows.append(pauli_coordinates(asm.marginal))
    return np.concatenate(rows)


def price(y: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Best column value and best Bloch vector for every strategy."""
    c = strategy_table(n) @ y[: 4 * n].reshape(n, 4) + y[4 * n:]
    norms = np.linalg.norm(c[:, 1:], axis=1)
    values = c[:, 0] + norms
    bloch = np.tile([0.0, 0.0, 1.0], (len(values), 1))
    nonzero = norms > 1e-300
    bloch[nonzero] = c[nonzero, 1:] / norms[nonzero, None]
    return values, bloch


def _columns(codes: np.ndarray, bloch: np.ndarray, n: int) -> np.ndarray:
    bits = strategy_table(n)[codes]
    v = np.column_stack([np.ones(len(codes)), bloch])
    blocks = (bits[:, :, None] * v[:, None, :]).reshape(len(codes), 4 * n)
    return np.hstack([blocks, v])


def _best(values: np.ndarray, count: int, floor: float) -> np.ndarray:
    count = min(count, len(values))
    idx = np.argpartition(-values, count - 1)[:count]
    idx = idx[values[idx] > floor]
    return idx[np.argsort(-values[idx], kind="stable")]


def _solve_master(columns: np.ndarray, b: np.ndarray):
    rows = len(b)
    m = columns.shape[0]
    a_eq = np.hstack([columns.T, np.eye(rows), -np.eye(rows)])
    cost = np.concatenate([np.zeros(m), np.ones(2 * rows)])
    res = linprog(cost, A_eq=a_eq, b_eq=b, bounds=(0, None), method="highs")
    if res.status != 0:
        raise SolverError(f"Restricted master LP failed: {res.message}")
    return res.x[:m], float(res.fun), np.asarray(res.eqlin.marginals, dtype=float)


def _model(codes, bloch, weights, asm: Assemblage) -> LhsModel:
    keep = weights > 0
    columns = tuple(
        LhsColumn(strategy=int(c), bloch=w.copy(), weight=float(x))
        for c, w, x in zip(codes[keep], bloch[keep], weights[keep])
    )
    partial = LhsModel(columns=columns, residual=0.0)
    residual = float(np.max(np.abs(partial.reconstruct(asm.n_settings) - asm.blocks)))
    return LhsModel(columns=columns, residual=residual)


def lhs_feasible(asm: Assemblage, tol: Optional[float] = None) -> FeasibilityResult:
    """
    Decide whether ``asm`` admits an LHS model.

    Returns a FeasibilityResult that is either feasible (with an explicit
    LhsModel), infeasible with a verified SteeringCertificate, or infeasible
    without one when the phase-1 optimum sits between ``tol`` and the
    certificate margin.

    Raises:
        SolverError: If HiGHS reports a failed restricted master.
        IterationLimit: If neither outcome is reached within MAX_LP_ROUNDS.
    """
    settings = get_settings()
    tol = settings.FEASIBILITY_TOL if tol is None else tol
    n = asm.n_settings
    b = target_vector(asm)

    # Warm start: price against the target itself
    values, bloch = price(b, n)
    codes = _best(values, 4 * settings.COLUMNS_PER_ROUND, -np.inf)
    pool_codes, pool_bloch = codes, bloch[codes]
    pool = _columns(pool_codes, pool_bloch, n)

    for round_ in range(1, settings.MAX_LP_ROUNDS + 1):
        weights, value, y = _solve_master(pool, b)
        if value <= tol:
            model = _model(pool_codes, pool_bloch, weights, asm)
            logger.debug(f"LHS model found in {round_} rounds (phase-1 {value:.2e}, residual {model.residual:.2e})")
            return FeasibilityResult(True, model, None, None, value, round_)

        values, bloch = price(y, n)
        best_value = float(values.max())
        if value - best_value >= settings.CERTIFICATE_MARGIN:
            cert = certificate_from_dual(y, asm)
            if cert.margin >= settings.CERTIFICATE_MARGIN:
                logger.debug(f"Steering certificate in {round_} rounds (margin {cert.margin:.3e})")
                return FeasibilityResult(False, None, y, cert, value, round_)
        if best_value <= settings.PRICING_TOL:
            logger.debug(f"Pricing converged at phase-1 {value:.3e} without a usable margin")
            return FeasibilityResult(False, None, y, None, value, round_)

        if len(pool_codes) > MAX_POOL:
            basic = weights > 0
            pool_codes, pool_bloch, pool = pool_codes[basic], pool_bloch[basic], pool[basic]
        new = _best(values, settings.COLUMNS_PER_ROUND, settings.PRICING_TOL)
        pool_codes = np.concatenate([pool_codes, new])
        pool_bloch = np.vstack([pool_bloch, bloch[new]])
        pool = np.vstack([pool, _columns(new, bloch[new], n)])

    raise IterationLimit(f"Column generation did not settle within {settings.MAX_LP_ROUNDS} rounds")


def steering_certificate(asm: Assemblage) -> SteeringCertificate:
    """
    Verified steering inequality violated by ``asm``.

    Raises:
        CertificateNotFound: If ``asm`` is LHS-feasible or no margin survives verification.
        SolverError: Propagated from ``lhs_feasible``, IterationLimit included.
    """
    result = lhs_feasible(asm)
    if result.feasible or result.certificate is None:
        raise CertificateNotFound("Assemblage admits an LHS model or no inequality clears the margin")
    cert = result.certificate
    if verify_certificate(cert, asm) < get_settings().CERTIFICATE_MARGIN:
        raise CertificateNotFound("Certificate failed re-verification")
    return cert
