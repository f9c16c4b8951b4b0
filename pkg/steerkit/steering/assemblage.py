# steerkit/steering/assemblage.py
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from steerkit.core.exceptions import InputError
from steerkit.qmat import (
    DEFAULT_TOLERANCE,
    IDENTITY_2,
    Operator,
    Party,
    as_operator,
    check_hermitian,
    ptrace,
    qubit_from_bloch,
    swap_operator,
    tensor,
)
from steerkit.states import is_psd
from steerkit.steering.mesh import DirectionMesh

PLUS, MINUS = 0, 1
COMPLETENESS_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class Assemblage:
    """
    Bob's unnormalized conditional states.

    ``blocks[k, a]`` is sigma_{a|k}, a = 0 for outcome + and 1 for outcome -.
    """
    blocks: np.ndarray
    source_state_psd: bool = True

    def __post_init__(self):
        b = np.array(self.blocks, dtype=complex, copy=True)
        if b.ndim != 4 or b.shape[1:] != (2, 2, 2):
            raise InputError(f"Assemblage blocks must have shape (N, 2, 2, 2), got {b.shape}")
        sums = b.sum(axis=1)
        if np.max(np.abs(sums - sums[0])) > COMPLETENESS_TOL:
            raise InputError("Assemblage marginals differ between settings")
        tr = np.trace(sums[0])
        if abs(tr - 1) > 1e-9:
            raise InputError(f"Assemblage marginal must have unit trace, got {tr:.6g}")
        if self.source_state_psd:
            for block in b.reshape(-1, 2, 2):
                if np.linalg.eigvalsh((block + block.conj().T) / 2)[0] < -PSD_TOL:
                    raise InputError("Assemblage element is not positive semidefinite")
        b.setflags(write=False)
        object.__setattr__(self, "blocks", b)

    @property
    def n_settings(self) -> int:
        return self.blocks.shape[0]

    @property
    def marginal(self) -> np.ndarray:
        return self.blocks[0].sum(axis=0)


def outcome_projectors(direction) -> tuple:
    """(Pi_+n, Pi_-n) with Pi_{±n} = (I ± n.sigma) / 2."""
    n = np.asarray(direction, dtype=float)
    return qubit_from_bloch(n), qubit_from_bloch(-n)


def assemblage(
    chi: Operator,
    mesh: DirectionMesh,
    steering_party: Party = Party.A,
    tol: float = DEFAULT_TOLERANCE,
) -> Assemblage:
    """
    sigma_{±|k} = Tr_A[(Pi_{±n_k} ⊗ I) chi] for every axis of ``mesh``.

    ``chi`` only has to be Hermitian with unit trace; depolarized operators
    beyond x = 1 are legitimate inputs. With ``steering_party = B`` the
    parties are swapped first so that Bob's measurements steer Alice.
    """
    arr = as_operator(chi, dims=(4,))
    check_hermitian(arr, tol)
    if Party(steering_party) is Party.B:
        arr = swap_operator(arr)

    blocks = np.empty((mesh.size, 2, 2, 2), dtype=complex)
    for k, n in enumerate(mesh.directions):
        for a, proj in enumerate(outcome_projectors(n)):
            block = ptrace(tensor(proj, IDENTITY_2) @ arr, Party.A)
            blocks[k, a] = (block + block.conj().T) / 2
    # Rounding in the contraction can break completeness at the 1e-16 level
    marginal = ptrace(arr, Party.A)
    marginal = (marginal + marginal.conj().T) / 2
    blocks[:, MINUS] = marginal - blocks[:, PLUS]
    return Assemblage(blocks=blocks, source_state_psd=is_psd(arr, PSD_TOL))
