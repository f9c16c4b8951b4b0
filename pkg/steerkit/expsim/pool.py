# steerkit/expsim/pool.py
"""
The hologram pool: 43 frames whose flux-weighted mixture realizes any state
of the two-parameter family.

- 1 ENTANGLED frame (no modulation, the source state |Psi+>).
- 6 PURE_PART frames |0> on Alice times one of the six tomography outcomes on Bob.
- 36 ISOTROPIC frames, all products of two tomography outcomes.

Averaging the six normalized outcome projectors gives I/2, so the pure part
averages to |0><0| ⊗ I/2 and the isotropic part to I/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from steerkit.qmat import projector, tensor
from steerkit.states import PSI_PLUS

OUTCOME_LABELS = ("X0", "X1", "Y0", "Y1", "Z0", "Z1")

_S = 1 / math.sqrt(2)
OUTCOME_KETS = (
    np.array([_S, _S], dtype=complex),
    np.array([_S, -_S], dtype=complex),
    np.array([_S, 1j * _S], dtype=complex),
    np.array([_S, -1j * _S], dtype=complex),
    np.array([1, 0], dtype=complex),
    np.array([0, 1], dtype=complex),
)
OUTCOME_PROJECTORS = tuple(projector(k) for k in OUTCOME_KETS)
KET_0 = OUTCOME_KETS[4]


class FrameKind(str, Enum):
    ENTANGLED = "entangled"
    PURE_PART = "pure_part"
    ISOTROPIC = "isotropic"


# Relative photon flux per frame kind. With the emergence probabilities of the
# sampler, these are the values for which the flux-weighted frame average
# equals the family state exactly.
FRAME_FLUX = {
    FrameKind.ENTANGLED: 1.0,
    FrameKind.PURE_PART: 1.0,
    FrameKind.ISOTROPIC: 0.5,
}


@dataclass(frozen=True, eq=False)
class Frame:
    kind: FrameKind
    alice_state: Optional[np.ndarray]
    bob_state: Optional[np.ndarray]
    flux: float

    @classmethod
    def create(cls, kind: FrameKind, alice=None, bob=None) -> "Frame":
        """Factory that attaches the flux of ``kind``."""
        if kind is FrameKind.ENTANGLED and (alice is not None or bob is not None):
            raise ValueError("The entangled frame carries no local states")
        if kind is not FrameKind.ENTANGLED and (alice is None or bob is None):
            raise ValueError(f"A {kind.value} frame needs both local states")
        return cls(kind=kind, alice_state=alice, bob_state=bob, flux=FRAME_FLUX[kind])

    def density(self) -> np.ndarray:
        if self.kind is FrameKind.ENTANGLED:
            return projector(PSI_PLUS)
        return tensor(projector(self.alice_state), projector(self.bob_state))


@dataclass(frozen=True, eq=False)
class HologramPool:
    frames: Tuple[Frame, ...]

    def indices(self, kind: FrameKind) -> np.ndarray:
        return np.array([i for i, f in enumerate(self.frames) if f.kind is kind], dtype=int)

    @property
    def fluxes(self) -> np.ndarray:
        return np.array([f.flux for f in self.frames])

    @property
    def kinds(self) -> Tuple[FrameKind, ...]:
        return tuple(f.kind for f in self.frames)

    @property
    def densities(self) -> np.ndarray:
        return _densities(self)

    def __len__(self):
        return len(self.frames)


@lru_cache(maxsize=None)
def _densities(pool: HologramPool) -> np.ndarray:
    out = np.array([f.density() for f in pool.frames])
    out.setflags(write=False)
    return out


ENTANGLED_INDEX = 0
PURE_PART_OFFSET = 1
ISOTROPIC_OFFSET = 7


@lru_cache(maxsize=1)
def pool_build() -> HologramPool:
    """Pool layout: index 0 entangled, 1..6 pure part (by Bob outcome), 7..42 isotropic (6a + b)."""
    frames = [Frame.create(FrameKind.ENTANGLED)]
    frames += [Frame.create(FrameKind.PURE_PART, KET_0, b) for b in OUTCOME_KETS]
    frames += [Frame.create(FrameKind.ISOTROPIC, a, b) for a in OUTCOME_KETS for b in OUTCOME_KETS]
    return HologramPool(tuple(frames))
