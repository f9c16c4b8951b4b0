# steerkit/steering/mesh.py
"""
Finite sets of Alice measurement axes and their shrinking factor.

An LHS model that reproduces the assemblage of a finite mesh at
depolarization x also reproduces every projective measurement at
depolarization eta * x, where eta is the inradius of conv{±n_k}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from steerkit.core.exceptions import DegenerateHull, InputError, MeshTooLarge, MeshTooSmall

logger = logging.getLogger(__name__)

MIN_DIRECTIONS = 2
MAX_DIRECTIONS = 16
NORM_TOL = 1e-12
PARALLEL_ANGLE = 1e-6

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
PHI = (1 + math.sqrt(5)) / 2


@dataclass(frozen=True)
class DirectionMesh:
    """Up to 16 unit axes, pairwise neither parallel nor antiparallel."""
    directions: np.ndarray

    def __post_init__(self):
        d = np.array(self.directions, dtype=float, copy=True)
        if d.ndim != 2 or d.shape[1] != 3:
            raise InputError(f"Directions must be an (N, 3) array, got shape {d.shape}")
        n = d.shape[0]
        if n < MIN_DIRECTIONS:
            raise MeshTooSmall(f"A mesh needs at least {MIN_DIRECTIONS} directions, got {n}")
        if n > MAX_DIRECTIONS:
            raise MeshTooLarge(f"A mesh holds at most {MAX_DIRECTIONS} directions, got {n}")
        norms = np.linalg.norm(d, axis=1)
        if np.any(norms == 0):
            raise InputError("Directions must be nonzero")
        d = d / norms[:, None]
        cos_limit = math.cos(PARALLEL_ANGLE)
        overlap = np.abs(d @ d.T) - np.eye(n)
        if np.any(overlap > cos_limit):
            raise InputError("Mesh contains parallel or antiparallel directions")
        d.setflags(write=False)
        object.__setattr__(self, "directions", d)

    @property
    def size(self) -> int:
        return self.directions.shape[0]

    @cached_property
    def eta(self) -> float:
        return shrinking_factor(self)

    def with_direction(self, direction) -> "DirectionMesh":
        return DirectionMesh(np.vstack([self.directions, np.asarray(direction, dtype=float)]))

    def __hash__(self):
        return hash(self.directions.tobytes())

    def __eq__(self, other):
        if not isinstance(other, DirectionMesh):
            return NotImplemented
        return self.directions.shape == other.directions.shape and bool(
            np.array_equal(self.directions, other.directions)
        )


def axes_mesh() -> DirectionMesh:
    """The three Pauli axes (octahedron, eta = 1/sqrt(3))."""
    return DirectionMesh(np.eye(3))


def icosahedral_mesh() -> DirectionMesh:
    """Six axes through opposite vertices of the icosahedron."""
    return DirectionMesh(np.array([
        [0, 1, PHI], [0, 1, -PHI],
        [1, PHI, 0], [1, -PHI, 0],
        [PHI, 0, 1], [-PHI, 0, 1],
    ]))


def fibonacci_mesh(n: int) -> DirectionMesh:
    """
    ``n`` axes spread by a golden-angle spiral over the upper hemisphere.

    Heights z_i = (i + 1/2) / n are strictly positive, so no axis is the
    antipode of another and the symmetrized set {±n_i} is evenly spaced in z
    over the whole sphere. n = 3 and n = 6 return the canonical octahedral
    and icosahedral meshes.

    Raises:
        MeshTooSmall: n < 2.
        MeshTooLarge: n > 16.
    """
    if n < MIN_DIRECTIONS:
        raise MeshTooSmall(f"A mesh needs at least {MIN_DIRECTIONS} directions, got {n}")
    if n > MAX_DIRECTIONS:
        raise MeshTooLarge(f"A mesh holds at most {MAX_DIRECTIONS} directions, got {n}")
    if n == 3:
        return axes_mesh()
    if n == 6:
        return icosahedral_mesh()

    i = np.arange(n)
    z = (i + 0.5) / n
    radius = np.sqrt(1 - z ** 2)
    phi = i * GOLDEN_ANGLE
    points = np.column_stack([radius * np.cos(phi), radius * np.sin(phi), z])
    return DirectionMesh(points)


def shrinking_factor(mesh: DirectionMesh) -> float:
    """
    Inradius of conv{±n_k}: the smallest origin-to-facet distance.

    Raises:
        DegenerateHull: If the symmetrized directions are coplanar.
    """
    d = mesh.directions
    if np.linalg.matrix_rank(d, tol=1e-9) < 3:
        raise DegenerateHull(f"The {mesh.size} directions span fewer than 3 dimensions")
    points = np.vstack([d, -d])
    try:
        hull = ConvexHull(points)
    except QhullError as e:
        raise DegenerateHull(f"Convex hull failed: {e}") from e
    # Facet equations are normal . x + offset <= 0 with unit normals
    eta = float(np.min(-hull.equations[:, -1]))
    if eta <= NORM_TOL:
        raise DegenerateHull("Symmetrized mesh has zero inradius")
    logger.debug(f"Shrinking factor of {mesh.size}-direction mesh: {eta:.10f}")
    return eta
