# tests/unit/test_qmat.py

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from steerkit.core.exceptions import DimensionMismatch, InvalidState, NonHermitianInput
from steerkit.qmat import (
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Z,
    DensityMatrix,
    Party,
    bloch_assemble,
    bloch_decompose,
    fidelity,
    hermitian_eig,
    partial_trace,
    partial_transpose,
    random_state,
    random_unitary,
    swap_parties,
    tensor,
)
from steerkit.states import FamilyParams, family_state

KET0 = np.array([[1, 0], [0, 0]], dtype=complex)
KET1 = np.array([[0, 0], [0, 1]], dtype=complex)


# ---------------------------------------------
# hermitian_eig
# ---------------------------------------------

@pytest.mark.parametrize(
    "matrix, expected",
    [
        (IDENTITY_2, [1.0, 1.0]),
        (SIGMA_Z, [1.0, -1.0]),
        (SIGMA_X, [1.0, -1.0]),
    ],
    ids=["identity", "sigma_z", "sigma_x"],
)
def test_hermitian_eig_values_descending(matrix, expected):
    vals, _ = hermitian_eig(matrix)
    assert np.allclose(vals, expected), f"Expected {expected}, got {vals}"


def test_hermitian_eig_singlet_is_rank_one(singlet):
    vals, vecs = hermitian_eig(singlet)
    assert np.allclose(vals, [1, 0, 0, 0], atol=1e-12)
    assert np.allclose(vecs.conj().T @ vecs, np.eye(4), atol=1e-10)


def test_hermitian_eig_residual(rng):
    rho = random_state(rng).mat
    vals, vecs = hermitian_eig(rho)
    residual = np.max(np.abs(rho @ vecs - vecs * vals))
    assert residual <= 4e-10


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


def test_hermitian_eig_rejects_bad_shape():
    with pytest.raises(DimensionMismatch):
        hermitian_eig(np.eye(3))


# ---------------------------------------------
# tensor, partial trace, partial transpose
# ---------------------------------------------

def test_tensor_identity():
    assert np.allclose(tensor(IDENTITY_2, IDENTITY_2), np.eye(4))


def test_tensor_diagonal():
    assert np.allclose(tensor(KET0, IDENTITY_2 / 2), np.diag([0.5, 0.5, 0, 0]))


def test_tensor_trace_is_multiplicative(rng):
    x, y = random_state(rng, 2).mat * 3, random_state(rng, 2).mat * 0.5
    assert np.isclose(np.trace(tensor(x, y)), np.trace(x) * np.trace(y))


def test_partial_trace_of_singlet_is_maximally_mixed(singlet):
    assert np.allclose(partial_trace(singlet, Party.A).mat, IDENTITY_2 / 2)
    assert np.allclose(partial_trace(singlet, Party.B).mat, IDENTITY_2 / 2)


def test_partial_trace_of_product(rng):
    x, y = random_state(rng, 2), random_state(rng, 2)
    rho = DensityMatrix(tensor(x.mat, y.mat))
    assert np.allclose(partial_trace(rho, Party.A).mat, y.mat, atol=1e-12)
    assert np.allclose(partial_trace(rho, Party.B).mat, x.mat, atol=1e-12)


def test_partial_trace_of_family_state():
    p, r = 0.4, 0.8
    rho = family_state(FamilyParams(p=p, r=r))
    expected = p * IDENTITY_2 / 2 + (1 - p) * (IDENTITY_2 + r * SIGMA_Z) / 2
    assert np.allclose(partial_trace(rho, Party.B).mat, expected, atol=1e-12)


def test_partial_trace_rejects_qubit():
    with pytest.raises(DimensionMismatch):
        partial_trace(DensityMatrix.maximally_mixed(2), Party.A)


def test_partial_transpose_singlet_has_negative_eigenvalue(singlet):
    vals, _ = hermitian_eig(partial_transpose(singlet, Party.B))
    assert np.isclose(vals[-1], -0.5)


@pytest.mark.parametrize("side", [Party.A, Party.B], ids=["alice", "bob"])
def test_partial_transpose_is_involution(rng, side):
    rho = random_state(rng).mat
    assert np.allclose(partial_transpose(partial_transpose(rho, side), side), rho, atol=1e-14)


def test_partial_transpose_keeps_diagonal_states():
    rho = np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex)
    assert np.allclose(partial_transpose(rho, Party.A), rho)
    assert np.allclose(partial_transpose(np.eye(4) / 4, Party.B), np.eye(4) / 4)


# ---------------------------------------------
# DensityMatrix validation
# ---------------------------------------------

def test_density_matrix_rejects_wrong_trace():
    with pytest.raises(InvalidState, match="Trace"):
        DensityMatrix(np.eye(2))


def test_density_matrix_rejects_negative_eigenvalue():
    with pytest.raises(InvalidState, match="positive semidefinite"):
        DensityMatrix(np.diag([1.2, -0.2]))


def test_density_matrix_is_read_only(singlet):
    with pytest.raises(ValueError):
        singlet.mat[0, 0] = 1.0


def test_density_matrix_eigenvalues_sum_to_one(rng):
    vals = random_state(rng).eigenvalues()
    assert abs(vals.sum() - 1) <= 1e-10
    assert vals.min() >= -1e-9


# ---------------------------------------------
# fidelity
# ---------------------------------------------

def test_fidelity_with_itself(rng):
    rho = random_state(rng)
    assert np.isclose(fidelity(rho, rho), 1.0, atol=1e-8)


def test_fidelity_orthogonal_pure_states():
    assert fidelity(KET0, KET1) == pytest.approx(0.0, abs=1e-12)


def test_fidelity_mixed_against_pure():
    assert fidelity(IDENTITY_2 / 2, KET0) == pytest.approx(0.5, abs=1e-12)


def test_fidelity_is_symmetric(rng):
    a, b = random_state(rng), random_state(rng)
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-10)


@hyp_settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_fidelity_invariant_under_joint_unitary(seed):
    rng = np.random.default_rng(seed)
    a, b = random_state(rng), random_state(rng)
    u = random_unitary(rng)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
    turned = [u @ m.mat @ u.conj().T for m in (a, b)]
    assert fidelity(*turned) == pytest.approx(fidelity(a, b), abs=1e-7)


def test_fidelity_dimension_mismatch(singlet):
    with pytest.raises(DimensionMismatch):
        fidelity(singlet, IDENTITY_2 / 2)


# ---------------------------------------------
# swap_parties and Bloch coordinates
# ---------------------------------------------

def test_swap_keeps_singlet(singlet):
    assert swap_parties(singlet) == singlet


def test_swap_exchanges_product_factors(rng):
    x, y = random_state(rng, 2).mat, random_state(rng, 2).mat
    swapped = swap_parties(DensityMatrix(tensor(x, y)))
    assert np.allclose(swapped.mat, tensor(y, x), atol=1e-12)


def test_swap_moves_marginals():
    rho = family_state(FamilyParams(p=0.4, r=0.9))
    assert np.allclose(partial_trace(swap_parties(rho), Party.B).mat, IDENTITY_2 / 2, atol=1e-12)


def test_bloch_of_singlet(singlet):
    rep = bloch_decompose(singlet)
    assert np.allclose(rep.a, 0) and np.allclose(rep.b, 0)
    assert np.allclose(rep.T, np.diag([1, 1, -1]))


def test_bloch_of_maximally_mixed(maximally_mixed):
    rep = bloch_decompose(maximally_mixed)
    assert np.allclose(rep.a, 0) and np.allclose(rep.b, 0) and np.allclose(rep.T, 0)


@hyp_settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_bloch_round_trip(seed):
    rho = random_state(np.random.default_rng(seed))
    rep = bloch_decompose(rho)
    assert np.allclose(bloch_assemble(rep), rho.mat, atol=1e-12)
    again = bloch_decompose(bloch_assemble(rep))
    assert np.allclose(again.T, rep.T, atol=1e-12)
