# steerkit/core/exceptions.py
"""
Error hierarchy shared by every steerkit module.

Two families matter to callers: ``InputError`` (bad data handed to the
library, exit code 2 on the command line) and ``SolverError`` (the numerics
could not finish, exit code 4). ``CertificateNotFound`` is a plain signal
used between the LP layer and its callers.
"""


class SteerkitError(Exception):
    """Base class for all steerkit errors."""
    pass


class InputError(SteerkitError):
    """Raised when an input violates a documented precondition."""
    pass


class NonHermitianInput(InputError):
    """Raised when a matrix fails the Hermiticity check."""
    pass


class DimensionMismatch(InputError):
    """Raised when operand dimensions do not fit the operation."""
    pass


class InvalidState(InputError):
    """Raised when a matrix is not a valid density matrix."""
    pass


class MeshTooSmall(InputError):
    """Raised when a direction mesh has fewer than 2 directions."""
    pass


class MeshTooLarge(InputError):
    """Raised when a direction mesh has more than 16 directions."""
    pass


class DegenerateHull(InputError):
    """Raised when the symmetrized mesh spans no full-dimensional polytope."""
    pass


class EmptyAnimation(InputError):
    """Raised when an animation holds no frames."""
    pass


class EmptyCounts(InputError):
    """Raised when a counts table has zero total."""
    pass


class InvalidRate(InputError):
    """Raised when a source rate or efficiency is out of range."""
    pass


class CountsFormatError(InputError):
    """Raised when a counts CSV or its sidecar is malformed."""
    pass


class SolverError(SteerkitError):
    """Raised when the numerical machinery fails to reach a decision."""
    pass


class IterationLimit(SolverError):
    """Raised when column generation exhausts its round budget."""
    pass


class CertificateNotFound(SteerkitError):
    """Raised when no verified steering certificate exists for an assemblage."""
    pass


class IndeterminateResult(SteerkitError):
    """Raised in strict mode when a certification step reached no decision."""
    pass
