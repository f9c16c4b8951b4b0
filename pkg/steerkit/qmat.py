# steerkit/qmat.py
"""
Module: qmat.py

Dense complex linear algebra for one- and two-qubit operators.

Matrices are plain ``numpy.ndarray`` objects of shape (2, 2) or (4, 4) with
complex dtype. ``DensityMatrix`` wraps such an array after checking that it
is a physical state, and is immutable once built. Two-qubit operators use the
basis order |00>, |01>, |10>, |11> with Alice as the first tensor factor.

Functions:
- hermitian_eig(m): eigenvalues (descending) and orthonormal eigenvectors.
- tensor(x, y): Kronecker product.
- partial_trace(rho, side) / partial_transpose(rho, side): bipartite maps.
- fidelity(rho, sigma): Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2.
- swap_parties(rho): exchange Alice and Bob.
- bloch_decompose(rho) / bloch_assemble(rep): Pauli-basis coordinates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from steerkit.core.exceptions import DimensionMismatch, InvalidState, NonHermitianInput

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

# Permutation |ab> -> |ba>: basis order 00,01,10,11 -> 00,10,01,11
SWAP = np.array(
    [[1, 0, 0, 0],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1]],
    dtype=complex,
)


class Party(str, Enum):
    """The two parties of a bipartite state."""
    A = "A"
    B = "B"


def as_operator(m, dims: Tuple[int, ...] = (2, 4)) -> np.ndarray:
    """Return ``m`` as a complex square array whose size is one of ``dims``."""
    if isinstance(m, DensityMatrix):
        return m.mat
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] not in dims:
        raise DimensionMismatch(f"Expected a square matrix of size {dims}, got shape {arr.shape}")
    return arr


def hermiticity_error(m: np.ndarray) -> float:
    """Largest entrywise deviation of ``m`` from its conjugate transpose."""
    return float(np.max(np.abs(m - m.conj().T)))


def check_hermitian(m: np.ndarray, tol: float = DEFAULT_TOLERANCE) -> None:
    err = hermiticity_error(m)
    if err > tol:
        raise NonHermitianInput(f"Matrix is not Hermitian: max |m - m^dagger| = {err:.3e} > {tol:.1e}")


def hermitian_eig(m, tol: float = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian matrix.

    Args:
        m: Hermitian 2x2 or 4x4 matrix (array or DensityMatrix).
        tol: Symmetry slack accepted before raising.

    Returns:
        (eigenvalues, eigenvectors): real eigenvalues sorted in descending
        order and a unitary whose columns are the matching eigenvectors.

    Raises:
        NonHermitianInput: If ``m`` is not Hermitian within ``tol``.

    Example:
        >>> vals, vecs = hermitian_eig(SIGMA_Z)
        >>> vals
        array([ 1., -1.])
    """
    arr = as_operator(m)
    check_hermitian(arr, tol)
    # LAPACK only reads one triangle; symmetrize so the residual reflects both
    herm = (arr + arr.conj().T) / 2
    vals, vecs = np.linalg.eigh(herm)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def tensor(x, y) -> np.ndarray:
    """Kronecker product ``x ⊗ y``."""
    return np.kron(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))


def projector(vec) -> np.ndarray:
    """Rank-one projector onto the normalized ``vec``."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class DensityMatrix:
    """
    A validated quantum state: Hermitian, unit trace, positive semidefinite.

    The wrapped array is copied and made read-only so instances can be
    shared freely between threads and processes.
    """
    mat: np.ndarray
    tolerance: float = DEFAULT_TOLERANCE
    validate: bool = field(default=True, compare=False)

    def __post_init__(self):
        arr = np.array(as_operator(self.mat), dtype=complex, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "mat", arr)
        if self.validate:
            self._check()

    def _check(self) -> None:
        tol = self.tolerance
        check_hermitian(self.mat, tol)
        tr = np.trace(self.mat)
        if abs(tr.real - 1.0) > tol or abs(tr.imag) > tol:
            raise InvalidState(f"Trace must be 1, got {tr:.6g}")
        min_eig = float(np.linalg.eigvalsh((self.mat + self.mat.conj().T) / 2)[0])
        if min_eig < -tol:
            raise InvalidState(f"State is not positive semidefinite: min eigenvalue {min_eig:.3e}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_pure(cls, vec, tolerance: float = DEFAULT_TOLERANCE) -> "DensityMatrix":
        return cls(projector(vec), tolerance=tolerance)

    @classmethod
    def maximally_mixed(cls, dim: int = 4) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    def eigenvalues(self) -> np.ndarray:
        return hermitian_eig(self.mat, self.tolerance)[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.mat.shape == other.mat.shape and np.allclose(
            self.mat, other.mat, atol=max(self.tolerance, other.tolerance)
        )

    def __hash__(self):
        return hash(self.mat.tobytes())

    def __repr__(self):
        return f"<DensityMatrix(dim={self.dim})>"


Operator = Union[np.ndarray, DensityMatrix]


def _require_two_qubit(m: Operator) -> np.ndarray:
    arr = as_operator(m)
    if arr.shape != (4, 4):
        raise DimensionMismatch(f"Expected a 4x4 two-qubit operator, got shape {arr.shape}")
    return arr


def ptrace(m: Operator, side: Party) -> np.ndarray:
    """Partial trace of a 4x4 operator over ``side``, no validation."""
    arr = _require_two_qubit(m).reshape(2, 2, 2, 2)
    if Party(side) is Party.A:
        return np.einsum("ijik->jk", arr)
    return np.einsum("ijkj->ik", arr)


def partial_trace(rho: Operator, side: Party) -> DensityMatrix:
    """Reduced state after tracing out ``side`` (``A`` leaves Bob's state)."""
    tol = rho.tolerance if isinstance(rho, DensityMatrix) else DEFAULT_TOLERANCE
    return DensityMatrix(ptrace(rho, side), tolerance=tol)


def partial_transpose(rho: Operator, side: Party) -> np.ndarray:
    """Transpose the ``side`` factor of a 4x4 operator."""
    arr = _require_two_qubit(rho).reshape(2, 2, 2, 2)
    if Party(side) is Party.A:
        out = arr.transpose(2, 1, 0, 3)
    else:
        out = arr.transpose(0, 3, 2, 1)
    return out.reshape(4, 4)


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Square root of a Hermitian matrix with negative eigenvalues clipped to 0."""
    vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    roots = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * roots) @ vecs.conj().T


def fidelity(rho: Operator, sigma: Operator) -> float:
    """
    Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2, clipped to [0, 1].

    Raises:
        DimensionMismatch: If the two states have different sizes.
    """
    a, b = as_operator(rho), as_operator(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"Cannot compare states of shapes {a.shape} and {b.shape}")
    root = psd_sqrt(a)
    inner = psd_sqrt(root @ b @ root)
    value = float(np.real(np.trace(inner)) ** 2)
    return min(max(value, 0.0), 1.0)


def swap_parties(rho: DensityMatrix) -> DensityMatrix:
    """Exchange the roles of Alice and Bob."""
    arr = _require_two_qubit(rho)
    tol = rho.tolerance if isinstance(rho, DensityMatrix) else DEFAULT_TOLERANCE
    return DensityMatrix(SWAP @ arr @ SWAP, tolerance=tol)


def swap_operator(m: Operator) -> np.ndarray:
    """``swap_parties`` for arbitrary (possibly non-PSD) 4x4 operators."""
    arr = _require_two_qubit(m)
    return SWAP @ arr @ SWAP


@dataclass(frozen=True)
class BlochRep:
    """Pauli coordinates: rho = (I + a.s x I + I x b.s + sum T_ij s_i x s_j) / 4."""
    a: np.ndarray
    b: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        for name, shape in (("a", (3,)), ("b", (3,)), ("T", (3, 3))):
            arr = np.array(getattr(self, name), dtype=float, copy=True)
            if arr.shape != shape:
                raise DimensionMismatch(f"BlochRep.{name} must have shape {shape}, got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def bloch_decompose(rho: Operator) -> BlochRep:
    arr = _require_two_qubit(rho)
    a = [np.real(np.trace(arr @ tensor(s, IDENTITY_2))) for s in PAULIS]
    b = [np.real(np.trace(arr @ tensor(IDENTITY_2, s))) for s in PAULIS]
    T = [[np.real(np.trace(arr @ tensor(si, sj))) for sj in PAULIS] for si in PAULIS]
    return BlochRep(a=np.array(a), b=np.array(b), T=np.array(T))


def bloch_assemble(rep: BlochRep) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    for i, s in enumerate(PAULIS):
        out += rep.a[i] * tensor(s, IDENTITY_2)
        out += rep.b[i] * tensor(IDENTITY_2, s)
        for j, t in enumerate(PAULIS):
            out += rep.T[i, j] * tensor(s, t)
    return out / 4


def qubit_from_bloch(vec) -> np.ndarray:
    """Single-qubit operator (I + v.sigma) / 2 for a real 3-vector ``v``."""
    v = np.asarray(vec, dtype=float)
    return (IDENTITY_2 + v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z) / 2


def pauli_coordinates(m: np.ndarray) -> np.ndarray:
    """Real vector (tr m, tr m.sx, tr m.sy, tr m.sz) of a Hermitian 2x2 matrix."""
    arr = np.asarray(m, dtype=complex)
    return np.real([np.trace(arr), *(np.trace(arr @ s) for s in PAULIS)])


def random_unitary(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_state(rng: np.random.Generator, dim: int = 4, rank: Optional[int] = None) -> DensityMatrix:
    """Random state from the induced (Hilbert-Schmidt for full rank) measure."""
    k = dim if rank is None else rank
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.real(np.trace(m)))
