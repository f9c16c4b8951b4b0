# tests/unit/test_states.py

import math

import numpy as np
import pytest
from pydantic import ValidationError

from steerkit.qmat import IDENTITY_2, DensityMatrix, Party, bloch_decompose, partial_trace, ptrace, random_state
from steerkit.states import (
    FAMILY_M1,
    FAMILY_M2,
    PSI_PLUS_PROJECTOR,
    FamilyParams,
    ThetaFamilyParams,
    bowles_one_way_predicate,
    depolarize_alice,
    family_state,
    is_psd,
    is_separable_ppt,
    min_pt_eigenvalue,
    random_separable,
    retrieve_params,
    theta_ket,
    theta_state,
)


# ---------------------------------------------
# family_state
# ---------------------------------------------

def test_family_state_pure_singlet():
    assert np.allclose(family_state(FamilyParams(p=1, r=0.5)).mat, PSI_PLUS_PROJECTOR)


def test_family_state_maximally_mixed():
    assert np.allclose(family_state(FamilyParams(p=0, r=0)).mat, np.eye(4) / 4)


@pytest.mark.parametrize("p", np.round(np.arange(0, 1.0001, 0.05), 2))
@pytest.mark.parametrize("r", np.round(np.arange(0, 1.0001, 0.05), 2))
def test_family_state_bloch_form(p, r):
    rep = bloch_decompose(family_state(FamilyParams(p=p, r=r)))
    assert np.allclose(rep.a, [0, 0, (1 - p) * r], atol=1e-12)
    assert np.allclose(rep.b, 0, atol=1e-12)
    assert np.allclose(rep.T, p * np.diag([1, 1, -1]), atol=1e-12)


def test_family_state_reference_point():
    rep = bloch_decompose(family_state(FamilyParams(p=0.4078, r=0.859)))
    assert rep.a[2] == pytest.approx(0.50870, abs=1e-5)


def test_family_state_bob_marginal_is_maximally_mixed():
    rho = family_state(FamilyParams(p=0.3, r=0.7))
    assert np.allclose(partial_trace(rho, Party.A).mat, IDENTITY_2 / 2, atol=1e-14)


@pytest.mark.parametrize("p, r", [(-0.1, 0.5), (1.1, 0.5), (0.5, -0.01), (0.5, 1.01)],
                         ids=["p_low", "p_high", "r_low", "r_high"])
def test_family_params_out_of_range(p, r):
    with pytest.raises(ValidationError):
        FamilyParams(p=p, r=r)


# ---------------------------------------------
# depolarize_alice
# ---------------------------------------------

def test_depolarize_identity(rng):
    rho = random_state(rng)
    assert np.allclose(depolarize_alice(rho, 1.0), rho.mat)


def test_depolarize_singlet_gives_werner(singlet, werner):
    assert np.allclose(depolarize_alice(singlet, 0.3), werner(0.3).mat, atol=1e-14)


def test_depolarize_composition_law():
    rho = family_state(FamilyParams(p=0.4078, r=0.859))
    twice = depolarize_alice(depolarize_alice(rho, 0.7), 0.5)
    assert np.allclose(twice, depolarize_alice(rho, 0.35), atol=1e-12)


def test_depolarize_preserves_bob_marginal(rng):
    rho = random_state(rng)
    for x in (0.0, 0.4, 1.7):
        assert np.allclose(ptrace(depolarize_alice(rho, x), Party.A), ptrace(rho, Party.A), atol=1e-14)


def test_depolarize_beyond_one_may_leave_psd_cone(singlet):
    assert not is_psd(depolarize_alice(singlet, 1.5))


# ---------------------------------------------
# retrieve_params
# ---------------------------------------------

def test_family_basis_gram_entries():
    assert np.trace(FAMILY_M1 @ FAMILY_M1).real == pytest.approx(0.75)
    assert np.trace(FAMILY_M2 @ FAMILY_M2).real == pytest.approx(0.25)
    assert np.trace(FAMILY_M1 @ FAMILY_M2).real == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("p, r", [(0.4078, 0.859), (0.0, 0.0), (0.2, 0.5), (0.9, 1.0)])
def test_retrieve_exact_members(p, r):
    got = retrieve_params(family_state(FamilyParams(p=p, r=r)))
    assert got.p == pytest.approx(p, abs=1e-12)
    assert got.r == pytest.approx(r, abs=1e-12)
    assert got.residual <= 1e-12
    assert not got.clamped


def test_retrieve_degenerate_singlet(singlet):
    got = retrieve_params(singlet)
    assert got.degenerate and got.r == 0.0 and got.p == pytest.approx(1.0)


def test_retrieve_clamps_outside_family():
    # |1><1| ⊗ I/2 pushes r below zero
    rho = DensityMatrix(np.diag([0, 0, 0.5, 0.5]))
    got = retrieve_params(rho)
    assert got.clamped
    assert 0.0 <= got.p <= 1.0 and 0.0 <= got.r <= 1.0
    assert got.residual > 0


# ---------------------------------------------
# PPT separability
# ---------------------------------------------

def test_ppt_maximally_mixed(maximally_mixed):
    separable, lam = is_separable_ppt(maximally_mixed)
    assert separable and lam == pytest.approx(0.25)


def test_ppt_singlet(singlet):
    separable, lam = is_separable_ppt(singlet)
    assert not separable and lam == pytest.approx(-0.5)


def test_ppt_werner_boundary(werner):
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if min_pt_eigenvalue(werner(mid)) >= 0:
            lo = mid
        else:
            hi = mid
    assert lo == pytest.approx(1 / 3, abs=1e-9)


def test_ppt_family_boundary_on_r_zero():
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if is_separable_ppt(family_state(FamilyParams(p=mid, r=0.0)))[0]:
            lo = mid
        else:
            hi = mid
    assert lo == pytest.approx(1 / 3, abs=1e-9)


def test_random_separable_passes_ppt(rng):
    for _ in range(20):
        assert is_separable_ppt(random_separable(rng))[0]


# ---------------------------------------------
# theta family and the one-way predicate
# ---------------------------------------------

def test_theta_state_maximally_entangled():
    ket = np.array([1, 0, 0, 1]) / math.sqrt(2)
    rho = theta_state(ThetaFamilyParams(theta=math.pi / 4, p=1))
    assert np.allclose(rho.mat, np.outer(ket, ket))


@pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 4])
def test_theta_state_bob_marginal(theta):
    rho = theta_state(ThetaFamilyParams(theta=theta, p=0.6))
    expected = np.diag([math.cos(theta) ** 2, math.sin(theta) ** 2])
    assert np.allclose(partial_trace(rho, Party.A).mat, expected, atol=1e-12)


def test_theta_state_no_entanglement_weight():
    theta = 0.4
    rho = theta_state(ThetaFamilyParams(theta=theta, p=0))
    expected = np.kron(IDENTITY_2 / 2, np.diag([math.cos(theta) ** 2, math.sin(theta) ** 2]))
    assert np.allclose(rho.mat, expected)


@pytest.mark.parametrize("p", [0.0, 0.3, 0.7, 1.0])
def test_theta_zero_is_separable(p):
    assert is_separable_ppt(theta_state(ThetaFamilyParams(theta=0.0, p=p)))[0]


def test_theta_ket_normalized():
    assert np.linalg.norm(theta_ket(0.37)) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "theta, p, expected",
    [
        (math.pi / 4, 0.9, False),
        (0.2, 0.5, False),
        (0.05, 0.9, False),
        (0.0, 0.9, True),
        (0.1, 0.95, False),
        (0.3, 0.55, True),
    ],
    ids=["symmetric_state", "p_half", "just_outside", "theta_zero", "high_p", "low_p_inside"],
)
def test_one_way_predicate(theta, p, expected):
    assert bowles_one_way_predicate(ThetaFamilyParams(theta=theta, p=p)) is expected


def test_one_way_predicate_reference_sides():
    rhs = (2 * 0.9 - 1) / ((2 - 0.9) * 0.9 ** 3)
    assert rhs == pytest.approx(0.99763, abs=1e-5)
    assert math.cos(0.1) ** 2 == pytest.approx(0.990033, abs=1e-6)
