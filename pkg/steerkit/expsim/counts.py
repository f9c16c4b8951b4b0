# steerkit/expsim/counts.py
"""
Coincidence counts over the 6 x 6 outcome grid: Poisson simulation and the
CSV exchange format.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import IO, Optional, Union

import numpy as np

from steerkit.core.exceptions import CountsFormatError, InvalidRate
from steerkit.core.rng import COUNTS_STREAM, stream
from steerkit.expsim.pool import OUTCOME_LABELS, OUTCOME_PROJECTORS, HologramPool, pool_build
from steerkit.expsim.sampler import AnimationSpec, SamplerConfig, effective_state_of
from steerkit.qmat import DensityMatrix, Operator, as_operator

logger = logging.getLogger(__name__)

COUNTS_HEADER = ("outcome_a", "outcome_b", "counts")
SETTINGS = 36


@dataclass(frozen=True)
class CountsTable:
    """Counts indexed by (Alice outcome, Bob outcome) in X0, X1, Y0, Y1, Z0, Z1 order."""
    counts: np.ndarray
    duration_s: float

    def __post_init__(self):
        arr = np.array(self.counts, dtype=float)
        if arr.shape != (6, 6):
            raise CountsFormatError(f"Counts table must be 6x6, got {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise CountsFormatError("Counts must be finite and nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def basis_totals(self) -> np.ndarray:
        """Counts per basis pair, shape (3, 3)."""
        return self.counts.reshape(3, 2, 3, 2).sum(axis=(1, 3))

    def frequencies(self) -> np.ndarray:
        """Counts normalized within each basis pair; pairs without counts stay zero."""
        blocks = self.counts.reshape(3, 2, 3, 2)
        totals = blocks.sum(axis=(1, 3), keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            freq = np.where(totals > 0, blocks / totals, 0.0)
        return freq.reshape(6, 6)


def crosstalk_matrix(leakage: float) -> np.ndarray:
    """Row-stochastic confusion matrix leaking each outcome into its basis partner."""
    if not 0.0 <= leakage <= 0.5:
        raise ValueError("Crosstalk leakage must lie in [0, 0.5]")
    block = np.array([[1 - leakage, leakage], [leakage, 1 - leakage]])
    return np.kron(np.eye(3), block)


def outcome_probabilities(rho: Operator, confusion: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Joint outcome probabilities tr[(P_a ⊗ P_b) rho] for the 36 outcome pairs.

    Each 2 x 2 basis-pair block sums to one. ``confusion[a, a']`` is the
    probability that true outcome a is recorded as a', applied on both sides.
    """
    arr = as_operator(rho, dims=(4,)).reshape(2, 2, 2, 2)
    proj = np.array(OUTCOME_PROJECTORS)
    probs = np.einsum("aji,bmk,ikjm->ab", proj, proj, arr).real
    if confusion is not None:
        probs = confusion.T @ probs @ confusion
    return probs


def expected_counts(rho: Operator, cfg: SamplerConfig, rate_hz: float, efficiency: float,
                    confusion: Optional[np.ndarray] = None) -> np.ndarray:
    """Mean counts with ``accumulation_s`` split evenly over the 36 settings."""
    check_rate(rate_hz, efficiency)
    dwell = cfg.accumulation_s / SETTINGS
    return rate_hz * efficiency * dwell * outcome_probabilities(rho, confusion)


def check_rate(rate_hz: float, efficiency: float) -> None:
    if not (math.isfinite(rate_hz) and rate_hz > 0):
        raise InvalidRate(f"Rate must be positive and finite, got {rate_hz}")
    if not (0 < efficiency <= 1):
        raise InvalidRate(f"Efficiency must lie in (0, 1], got {efficiency}")


def simulate_counts(
    source: Union[AnimationSpec, DensityMatrix, np.ndarray],
    pool: Optional[HologramPool],
    cfg: SamplerConfig,
    rate_hz: float,
    efficiency: float,
    seed: Optional[int] = None,
    confusion: Optional[np.ndarray] = None,
    noiseless: bool = False,
) -> CountsTable:
    """
    Simulate one tomography run of ``cfg.accumulation_s`` seconds.

    Args:
        source: An animation (looped and weighted by the source imbalance) or a state.
        pool: Hologram pool the animation indexes; defaults to the standard pool.
        cfg: Timing, imbalance and crosstalk settings.
        rate_hz: Pair rate at the source.
        efficiency: Overall detection efficiency.
        seed: Seed of the Poisson draws; defaults to ``cfg.seed``.
        confusion: Explicit outcome confusion matrix, overriding ``cfg.crosstalk``.
        noiseless: Return the expected counts instead of Poisson draws.

    Returns:
        CountsTable over the 36 outcome pairs.
    """
    check_rate(rate_hz, efficiency)
    if isinstance(source, AnimationSpec):
        rho = effective_state_of(source, pool or pool_build(), cfg)
    else:
        rho = source
    if confusion is None and cfg.crosstalk > 0:
        confusion = crosstalk_matrix(cfg.crosstalk)
    mean = expected_counts(rho, cfg, rate_hz, efficiency, confusion)
    if noiseless:
        return CountsTable(mean, cfg.accumulation_s)
    rng = stream(cfg.seed if seed is None else seed, COUNTS_STREAM)
    counts = rng.poisson(np.clip(mean, 0.0, None)).astype(float)
    logger.info(f"Simulated {int(counts.sum())} coincidences over {cfg.accumulation_s:g} s")
    return CountsTable(counts, cfg.accumulation_s)


def _format_count(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def write_counts_csv(table: CountsTable, out: IO[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COUNTS_HEADER)
    for a, label_a in enumerate(OUTCOME_LABELS):
        for b, label_b in enumerate(OUTCOME_LABELS):
            writer.writerow([label_a, label_b, _format_count(table.counts[a, b])])


def read_counts_csv(source: IO[str], duration_s: float) -> CountsTable:
    """
    Parse a counts CSV. Every one of the 36 outcome pairs must appear exactly once.

    Raises:
        CountsFormatError: Wrong header, unknown outcome token, bad count,
            duplicate or missing row.
    """
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != COUNTS_HEADER:
        raise CountsFormatError(f"Expected header {','.join(COUNTS_HEADER)}, got {header}")
    counts = np.full((6, 6), np.nan)
    for line, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 3:
            raise CountsFormatError(f"Line {line}: expected 3 fields, got {len(row)}")
        label_a, label_b, raw = (cell.strip() for cell in row)
        if label_a not in OUTCOME_LABELS or label_b not in OUTCOME_LABELS:
            raise CountsFormatError(f"Line {line}: unknown outcome token in {label_a},{label_b}")
        try:
            value = float(raw)
        except ValueError:
            raise CountsFormatError(f"Line {line}: counts {raw!r} is not a number")
        if not math.isfinite(value) or value < 0:
            raise CountsFormatError(f"Line {line}: counts must be nonnegative, got {raw}")
        a, b = OUTCOME_LABELS.index(label_a), OUTCOME_LABELS.index(label_b)
        if not np.isnan(counts[a, b]):
            raise CountsFormatError(f"Line {line}: duplicate row for {label_a},{label_b}")
        counts[a, b] = value
    missing = [f"{OUTCOME_LABELS[a]},{OUTCOME_LABELS[b]}" for a, b in zip(*np.nonzero(np.isnan(counts)))]
    if missing:
        raise CountsFormatError(f"Missing rows: {' '.join(missing)}")
    return CountsTable(counts, duration_s)
