# steerkit/schemas/density.py
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from steerkit.core.exceptions import InvalidState
from steerkit.qmat import DEFAULT_TOLERANCE, DensityMatrix, Operator, as_operator, check_hermitian


class DensityMatrixPayload(BaseModel):
    """Density-matrix JSON: real and imaginary parts, row-major."""
    dim: int = Field(..., description="Matrix size, 2 or 4")
    re: List[List[float]] = Field(..., description="Real part, dim rows of dim entries")
    im: List[List[float]] = Field(..., description="Imaginary part, dim rows of dim entries")

    model_config = ConfigDict(
        json_schema_extra={
            "examples": [
                {"dim": 2, "re": [[0.5, 0.0], [0.0, 0.5]], "im": [[0.0, 0.0], [0.0, 0.0]]},
            ]
        }
    )

    @field_validator("dim")
    @classmethod
    def check_dim(cls, v: int) -> int:
        if v not in (2, 4):
            raise ValueError("dim must be 2 or 4")
        return v

    @model_validator(mode="after")
    def check_shape(self) -> "DensityMatrixPayload":
        for name in ("re", "im"):
            rows = getattr(self, name)
            if len(rows) != self.dim or any(len(row) != self.dim for row in rows):
                raise ValueError(f"'{name}' must be a {self.dim}x{self.dim} array")
        return self

    def to_array(self) -> np.ndarray:
        return np.array(self.re, dtype=float) + 1j * np.array(self.im, dtype=float)

    def to_density(self, validate: bool = True, tolerance: float = DEFAULT_TOLERANCE) -> Operator:
        """
        The matrix as a DensityMatrix, or as a Hermitian-symmetrized array when
        ``validate`` is off.

        Raises:
            NonHermitianInput: With ``validate`` and a non-Hermitian matrix.
            InvalidState: With ``validate`` and a wrong trace or a negative eigenvalue.
        """
        arr = self.to_array()
        if validate:
            check_hermitian(arr, tolerance)
            return DensityMatrix(arr, tolerance=tolerance)
        herm = (arr + arr.conj().T) / 2
        trace = np.trace(herm).real
        if trace <= 0:
            raise InvalidState(f"Matrix trace must be positive, got {trace:.6g}")
        return herm / trace

    @classmethod
    def from_density(cls, rho: Operator) -> "DensityMatrixPayload":
        arr = as_operator(rho)
        return cls(dim=arr.shape[0], re=arr.real.tolist(), im=arr.imag.tolist())
