# steerkit/schemas/__init__.py
from .density import DensityMatrixPayload
from .steering import BracketResponse, CertificationResponse, VerdictResponse
from .experiment import (
    BatchResponse,
    CountsSidecar,
    ExperimentResponse,
    TomographyResponse,
    TomoReport,
)
from .run import OutputFormat, RunConfig

__all__ = [
    'DensityMatrixPayload',
    # Certification
    'BracketResponse',
    'CertificationResponse',
    'VerdictResponse',
    # Simulation and tomography
    'BatchResponse',
    'CountsSidecar',
    'ExperimentResponse',
    'TomographyResponse',
    'TomoReport',
    # Command options
    'OutputFormat',
    'RunConfig',
]
