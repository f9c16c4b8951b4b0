# steerkit/expsim/sampler.py
"""
Animation sampling and the effective state an animation produces.

Per frame the sampler draws up to four uniforms:

    lambda1 <= p_e                 -> the entangled frame
    otherwise lambda2 <= eta_hat   -> one of 6 pure-part frames (lambda3)
    otherwise                      -> one of 36 isotropic frames (lambda4)

with p_e = p / [(1 - p)(2 - r) + p] and eta_hat = r / (2 - r).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from steerkit.core.exceptions import EmptyAnimation
from steerkit.core.rng import ANIMATION_STREAM, stream
from steerkit.expsim.pool import (
    ENTANGLED_INDEX,
    ISOTROPIC_OFFSET,
    PURE_PART_OFFSET,
    FrameKind,
    HologramPool,
    pool_build,
)
from steerkit.qmat import DensityMatrix
from steerkit.states import FamilyParams

logger = logging.getLogger(__name__)

KIND_ORDER = (FrameKind.ENTANGLED, FrameKind.PURE_PART, FrameKind.ISOTROPIC)


class ImbalanceModel(str, Enum):
    CALIBRATED = "calibrated"
    ENTANGLED_RATE = "entangled_rate"


class SamplerConfig(BaseModel):
    """Inputs of one simulated run: the requested state, the source imbalance and the timing."""
    p_ipt: float = Field(..., ge=0.0, le=1.0)
    r_ipt: float = Field(..., ge=0.0, le=1.0)
    alpha: float = Field(1.106, gt=0.0, description="Entangled to product photon ratio")
    frames: int = Field(800, ge=1)
    exposure_s: float = Field(0.02, gt=0.0)
    accumulation_s: float = Field(20.0, gt=0.0)
    seed: int = Field(0, ge=0, le=2**64 - 1)
    imbalance_model: ImbalanceModel = ImbalanceModel.CALIBRATED
    crosstalk: float = Field(0.0, ge=0.0, le=0.5, description="Leakage of each outcome into its basis partner")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_played_frames(self) -> "SamplerConfig":
        if self.accumulation_s < self.exposure_s:
            raise ValueError("accumulation_s must cover at least one frame exposure")
        return self

    @property
    def configured(self) -> FamilyParams:
        """The state the imbalanced source actually produces."""
        return configured_params(self.p_ipt, self.r_ipt, self.alpha, self.imbalance_model)


class SamplerProbabilities(NamedTuple):
    p_e: float
    p_s: float
    p_i: float

    @property
    def class_masses(self) -> Tuple[float, float, float]:
        """Probability of drawing each frame kind (entangled, pure part, isotropic)."""
        return self.p_e, 6 * self.p_s, 36 * self.p_i

    @property
    def degenerate(self) -> bool:
        """True when the product part of the pool is never drawn."""
        return self.p_e >= 1.0


def pure_fraction(r: float) -> float:
    """Share of product frames drawn from the pure part."""
    return r / (2.0 - r)


def sampler_probabilities(p: float, r: float) -> SamplerProbabilities:
    """
    Per-frame selection probabilities for the family state rho(p, r).

    Args:
        p: Weight of |Psi+>.
        r: Bias of the product part.

    Returns:
        (p_e, p_s, p_i) with p_e + 6 p_s + 36 p_i = 1. At p = 1 the result is
        (1, 0, 0) and ``degenerate`` is set.

    Example:
        >>> sampler_probabilities(1.0, 0.3)
        SamplerProbabilities(p_e=1.0, p_s=0.0, p_i=0.0)
    """
    params = FamilyParams(p=p, r=r)
    p, r = params.p, params.r
    if p >= 1.0:
        logger.debug("p = 1: animation holds only the entangled frame")
        return SamplerProbabilities(1.0, 0.0, 0.0)
    p_e = p / ((1.0 - p) * (2.0 - r) + p)
    p_p = 1.0 - p_e
    eta_hat = pure_fraction(r)
    return SamplerProbabilities(p_e, eta_hat * p_p / 6.0, (1.0 - eta_hat) * p_p / 36.0)


def configured_params(p_ipt: float, r_ipt: float, alpha: float,
                      model: ImbalanceModel = ImbalanceModel.CALIBRATED) -> FamilyParams:
    """
    Parameters of the state produced when (p_ipt, r_ipt) is requested from a
    source with imbalance ``alpha``.

    CALIBRATED gives p_cfg = p_ipt * alpha and r_cfg = r_ipt / alpha, saturated
    at 1. ENTANGLED_RATE only rescales the entangled photons, which moves p and
    leaves r alone.
    """
    if ImbalanceModel(model) is ImbalanceModel.CALIBRATED:
        return FamilyParams(p=min(1.0, p_ipt * alpha), r=min(1.0, r_ipt / alpha))
    weight = alpha * p_ipt
    return FamilyParams(p=weight / (weight + 1.0 - p_ipt) if weight > 0 else 0.0, r=r_ipt)


def kind_multipliers(cfg: SamplerConfig) -> np.ndarray:
    """Flux multipliers (entangled, pure part, isotropic) from the source imbalance."""
    p, r, alpha = cfg.p_ipt, cfg.r_ipt, cfg.alpha
    if cfg.imbalance_model is ImbalanceModel.ENTANGLED_RATE:
        return np.array([alpha, 1.0, 1.0])
    target = cfg.configured
    m_e = target.p / p if p > 0 else 1.0
    m_s = (1.0 - target.p) * target.r / (r * (1.0 - p)) if p < 1 and r > 0 else 1.0
    m_i = (1.0 - target.p) * (1.0 - target.r) / ((1.0 - r) * (1.0 - p)) if p < 1 and r < 1 else 1.0
    return np.array([m_e, m_s, m_i])


@dataclass(frozen=True)
class AnimationSpec:
    frame_indices: np.ndarray
    probabilities: SamplerProbabilities

    def __post_init__(self):
        idx = np.asarray(self.frame_indices, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() > ISOTROPIC_OFFSET + 35):
            raise ValueError("Frame index outside the hologram pool")
        idx = idx.copy()
        idx.setflags(write=False)
        object.__setattr__(self, "frame_indices", idx)

    @property
    def frames(self) -> int:
        return int(self.frame_indices.size)

    def kind_counts(self) -> np.ndarray:
        idx = self.frame_indices
        entangled = np.count_nonzero(idx == ENTANGLED_INDEX)
        pure = np.count_nonzero((idx >= PURE_PART_OFFSET) & (idx < ISOTROPIC_OFFSET))
        return np.array([entangled, pure, idx.size - entangled - pure])

    def class_frequencies(self) -> np.ndarray:
        if self.frames == 0:
            raise EmptyAnimation("Animation holds no frames")
        return self.kind_counts() / self.frames


def sample_animation(cfg: SamplerConfig) -> AnimationSpec:
    """Draw ``cfg.frames`` pool indices from four independent seeded streams."""
    probs = sampler_probabilities(cfg.p_ipt, cfg.r_ipt)
    lam1, lam2, lam3, lam4 = (stream(cfg.seed, ANIMATION_STREAM, k).random(cfg.frames) for k in range(4))
    pure = PURE_PART_OFFSET + np.minimum((6 * lam3).astype(int), 5)
    isotropic = ISOTROPIC_OFFSET + np.minimum((36 * lam4).astype(int), 35)
    idx = np.where(
        lam1 <= probs.p_e,
        ENTANGLED_INDEX,
        np.where(lam2 <= pure_fraction(cfg.r_ipt), pure, isotropic),
    )
    animation = AnimationSpec(idx, probs)
    logger.info(f"Sampled {cfg.frames} frames, class frequencies {np.round(animation.class_frequencies(), 4).tolist()}")
    return animation


def _kind_index(pool: HologramPool) -> np.ndarray:
    return np.array([KIND_ORDER.index(kind) for kind in pool.kinds])


def _weighted_state(weights: np.ndarray, pool: HologramPool) -> DensityMatrix:
    total = weights.sum()
    if total <= 0:
        raise EmptyAnimation("Animation carries no photon flux")
    mat = np.einsum("f,fij->ij", weights / total, pool.densities)
    return DensityMatrix((mat + mat.conj().T) / 2)


def effective_state(p: float, r: float, pool: Optional[HologramPool] = None) -> DensityMatrix:
    """
    Flux-weighted average over the pool with exact selection probabilities.

    Equals family_state(p, r).
    """
    pool = pool or pool_build()
    probs = sampler_probabilities(p, r)
    per_kind = np.array([probs.p_e, probs.p_s, probs.p_i])
    weights = per_kind[_kind_index(pool)] * pool.fluxes
    return _weighted_state(weights, pool)


def frame_dwell(animation: AnimationSpec, cfg: SamplerConfig) -> np.ndarray:
    """Seconds each pool frame is on screen while the animation loops over ``cfg.accumulation_s``."""
    if animation.frames == 0:
        raise EmptyAnimation("Animation holds no frames")
    shown = max(1, int(round(cfg.accumulation_s / cfg.exposure_s)))
    played = animation.frame_indices[np.arange(shown) % animation.frames]
    return np.bincount(played, minlength=ISOTROPIC_OFFSET + 36) * cfg.exposure_s


def effective_state_of(
    animation: AnimationSpec,
    pool: Optional[HologramPool] = None,
    cfg: Optional[SamplerConfig] = None,
) -> DensityMatrix:
    """
    Flux-weighted average of the frames an animation actually shows.

    Without ``cfg`` every frame of the sequence counts once and the source is
    balanced. With ``cfg`` the sequence loops over the accumulation time and
    the source imbalance rescales the flux of each frame kind.
    """
    pool = pool or pool_build()
    if animation.frames == 0:
        raise EmptyAnimation("Animation holds no frames")
    if cfg is None:
        dwell = np.bincount(animation.frame_indices, minlength=len(pool)).astype(float)
        multipliers = np.ones(3)
    else:
        dwell = frame_dwell(animation, cfg)
        multipliers = kind_multipliers(cfg)
    weights = dwell * pool.fluxes * multipliers[_kind_index(pool)]
    return _weighted_state(weights, pool)
