from steerkit.expsim.counts import (
    CountsTable,
    crosstalk_matrix,
    outcome_probabilities,
    read_counts_csv,
    simulate_counts,
    write_counts_csv,
)
from steerkit.expsim.experiment import REFERENCE_RUNS, ExperimentReport, ReferenceRun, run_batch, run_experiment
from steerkit.expsim.pool import Frame, FrameKind, HologramPool, pool_build
from steerkit.expsim.sampler import (
    AnimationSpec,
    ImbalanceModel,
    SamplerConfig,
    configured_params,
    effective_state,
    effective_state_of,
    sample_animation,
    sampler_probabilities,
)
from steerkit.expsim.tomography import (
    TomographyResult,
    analyze_counts,
    bootstrap,
    project_to_physical,
    tomo_linear_inversion,
)

__all__ = [
    "CountsTable", "crosstalk_matrix", "outcome_probabilities", "read_counts_csv", "simulate_counts",
    "write_counts_csv",
    "REFERENCE_RUNS", "ExperimentReport", "ReferenceRun", "run_batch", "run_experiment",
    "Frame", "FrameKind", "HologramPool", "pool_build",
    "AnimationSpec", "ImbalanceModel", "SamplerConfig", "configured_params", "effective_state",
    "effective_state_of", "sample_animation", "sampler_probabilities",
    "TomographyResult", "analyze_counts", "bootstrap", "project_to_physical", "tomo_linear_inversion",
]
