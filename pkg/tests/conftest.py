import json
import logging
from pathlib import Path
from typing import Callable

import numpy as np
import pytest
from click.testing import CliRunner

from steerkit.core.config import get_settings
from steerkit.qmat import DensityMatrix
from steerkit.schemas.density import DensityMatrixPayload
from steerkit.states import PSI_PLUS, FamilyParams, family_state
from steerkit.steering.mesh import DirectionMesh, axes_mesh, fibonacci_mesh, icosahedral_mesh

# ======================================================================================
# Logging Configuration
# ======================================================================================
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


# ======================================================================================
# Settings
# ======================================================================================
@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Drop cached settings and any thread override from the environment."""
    monkeypatch.delenv("STEERKIT_THREADS", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


# ======================================================================================
# State Fixtures
# ======================================================================================
@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for reproducible random states."""
    return np.random.default_rng(12345)


@pytest.fixture
def singlet() -> DensityMatrix:
    """The maximally entangled |Psi+><Psi+|."""
    return DensityMatrix.from_pure(PSI_PLUS)


@pytest.fixture
def maximally_mixed() -> DensityMatrix:
    return DensityMatrix.maximally_mixed(4)


@pytest.fixture
def werner() -> Callable[[float], DensityMatrix]:
    """Werner state x |Psi+><Psi+| + (1 - x) I/4."""
    def build(x: float) -> DensityMatrix:
        return DensityMatrix(x * DensityMatrix.from_pure(PSI_PLUS).mat + (1 - x) * np.eye(4) / 4)
    return build


@pytest.fixture
def family() -> Callable[[float, float], DensityMatrix]:
    def build(p: float, r: float) -> DensityMatrix:
        return family_state(FamilyParams(p=p, r=r))
    return build


# ======================================================================================
# Mesh Fixtures
# ======================================================================================
@pytest.fixture
def axes() -> DirectionMesh:
    return axes_mesh()


@pytest.fixture
def icosahedral() -> DirectionMesh:
    return icosahedral_mesh()


@pytest.fixture
def mesh12() -> DirectionMesh:
    return fibonacci_mesh(12)


# ======================================================================================
# CLI Fixtures
# ======================================================================================
@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def state_file(tmp_path: Path) -> Callable[..., Path]:
    """Write a density matrix as state JSON and return its path."""
    def write(rho, name: str = "state.json") -> Path:
        path = tmp_path / name
        path.write_text(DensityMatrixPayload.from_density(rho).model_dump_json(), encoding="utf-8")
        return path
    return write


@pytest.fixture
def read_json() -> Callable[[Path], dict]:
    def read(path: Path) -> dict:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    return read


# ======================================================================================
# Pytest Command-Line Options
# ======================================================================================
def pytest_addoption(parser):
    """
    Add custom command line options:
      --run-slow    : Run tests marked as 'slow'
    """
    parser.addoption("--run-slow", action="store_true", help="Run tests marked as slow")


def pytest_collection_modifyitems(config, items):
    """
    Skip tests marked as 'slow' unless --run-slow is specified.
    """
    if not config.getoption("--run-slow"):
        skip_slow = pytest.mark.skip(reason="use --run-slow to run")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)
