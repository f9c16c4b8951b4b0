# tests/integration/test_experiment.py

import numpy as np
import pytest

from steerkit.expsim.counts import CountsTable, outcome_probabilities
from steerkit.expsim.experiment import REFERENCE_RUNS, bootstrap_brackets, run_batch, run_experiment
from steerkit.expsim.sampler import SamplerConfig, effective_state_of, sample_animation
from steerkit.states import retrieve_params
from steerkit.steering.hierarchy import HierarchyLabel
from steerkit.steering.mesh import axes_mesh
from steerkit.steering.radius import Direction

FAST = {"certify": False, "variations": 3}


# ---------------------------------------------
# Single runs
# ---------------------------------------------

def test_reference_run_reconstructs_with_high_fidelity():
    cfg = SamplerConfig(p_ipt=0.36875, r_ipt=0.95, seed=11)
    report = run_experiment(cfg, **FAST)
    assert report.target.p == pytest.approx(0.36875 * 1.106)
    assert report.tomography.fidelity_to_target >= 0.98
    assert report.verdict is None and report.brackets == {}
    assert report.counts.total == pytest.approx(34400, rel=0.05)


def test_retrieved_parameters_follow_the_animation():
    cfg = SamplerConfig(p_ipt=0.36875, r_ipt=0.95, seed=3)
    report = run_experiment(cfg, **FAST)
    shown = retrieve_params(effective_state_of(sample_animation(cfg), cfg=cfg))
    assert report.tomography.retrieved.p == pytest.approx(shown.p, abs=0.04)
    assert report.tomography.retrieved.p == pytest.approx(0.4078, abs=0.06)


def test_class_frequencies_sum_to_one():
    report = run_experiment(SamplerConfig(p_ipt=0.4, r_ipt=0.9, seed=2), **FAST)
    assert report.class_frequencies.sum() == pytest.approx(1.0)


def test_seed_reproducibility():
    cfg = SamplerConfig(p_ipt=0.4, r_ipt=0.9, seed=5)
    a = run_experiment(cfg, **FAST)
    b = run_experiment(cfg, **FAST)
    c = run_experiment(cfg, seed=6, **FAST)
    assert np.array_equal(a.counts.counts, b.counts.counts)
    assert a.tomography.bootstrap_sigma_p == b.tomography.bootstrap_sigma_p
    assert not np.array_equal(a.counts.counts, c.counts.counts)


def test_pure_singlet_run_is_two_way_steerable():
    cfg = SamplerConfig(p_ipt=1.0, r_ipt=0.5, seed=1)
    report = run_experiment(cfg, mesh=axes_mesh(), variations=2, bisection_steps=4)
    assert report.tomography.fidelity_to_target >= 0.98
    assert report.verdict.label is HierarchyLabel.TWO_WAY_STEERABLE
    assert set(report.brackets) == set(Direction)
    assert all(b.steerable for b in report.brackets.values())


# ---------------------------------------------
# Batches
# ---------------------------------------------

def test_batch_keeps_row_order():
    reports = run_batch(REFERENCE_RUNS[:3], seed=4, **FAST)
    assert [r.config.p_ipt for r in reports] == [row.p_ipt for row in REFERENCE_RUNS[:3]]
    assert len({r.config.seed for r in reports}) == 3


def test_batch_is_identical_for_any_worker_count():
    serial = run_batch(REFERENCE_RUNS[:2], seed=4, n_jobs=1, **FAST)
    pooled = run_batch(REFERENCE_RUNS[:2], seed=4, n_jobs=2, **FAST)
    for a, b in zip(serial, pooled):
        assert np.array_equal(a.counts.counts, b.counts.counts)


def test_batch_config_overrides():
    reports = run_batch(REFERENCE_RUNS[:1], config_overrides={"alpha": 1.0}, **FAST)
    assert reports[0].target.p == pytest.approx(REFERENCE_RUNS[0].p_ipt)


# ---------------------------------------------
# Bracket resamples
# ---------------------------------------------

def test_bootstrap_brackets_shape(singlet):
    counts = CountsTable(outcome_probabilities(singlet) * 5000 / 9, 20.0)
    resampled = bootstrap_brackets(counts, axes_mesh(), resamples=2, seed=3, bisection_steps=3)
    assert len(resampled) == 2
    for brackets in resampled:
        assert set(brackets) == set(Direction)
        assert all(b.lo <= b.hi for b in brackets.values())


def test_run_reports_bracket_resamples():
    cfg = SamplerConfig(p_ipt=1.0, r_ipt=0.5, seed=1)
    report = run_experiment(cfg, mesh=axes_mesh(), variations=2, bisection_steps=2,
                            certify=False, bracket_resamples=2)
    assert len(report.resample_brackets) == 2


# ---------------------------------------------
# Acceptance-scale runs
# ---------------------------------------------

@pytest.mark.slow
def test_reference_rows():
    reports = run_batch(REFERENCE_RUNS, seed=0, n_jobs=0, certify=False)
    deviations = []
    for row, report in zip(REFERENCE_RUNS, reports):
        tomo = report.tomography
        assert report.target.p == pytest.approx(row.p_cfg, abs=1e-3)
        assert report.target.r == pytest.approx(row.r_cfg, abs=1e-3)
        assert tomo.fidelity_to_target >= 0.99
        assert 0.001 < tomo.bootstrap_sigma_p < 0.05

        # sigma covers counting noise, so compare with the state the animation showed
        shown = retrieve_params(effective_state_of(sample_animation(report.config), cfg=report.config))
        sigma_p = max(tomo.bootstrap_sigma_p, row.p_cfg_err)
        sigma_r = max(tomo.bootstrap_sigma_r, row.r_cfg_err)
        deviations += [abs(tomo.retrieved.p - shown.p) / sigma_p, abs(tomo.retrieved.r - shown.r) / sigma_r]

        assert tomo.retrieved.p == pytest.approx(row.p_cfg, abs=0.05)
        assert tomo.retrieved.r == pytest.approx(row.r_cfg, abs=0.09)

    assert max(deviations) <= 4.0
    assert sum(d <= 2.0 for d in deviations) >= 16
