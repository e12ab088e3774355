import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from qcorr.hamiltonian import SystemSpec
from qcorr.presets import free_system, random_system

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def spec2() -> SystemSpec:
    """Qubit system with pair and triple interactions."""
    return random_system(seed=5, dim_single=2, orders=(2, 3))


@pytest.fixture(scope="session")
def spec_pair() -> SystemSpec:
    """Qubit system with only a pair interaction."""
    return random_system(seed=6, dim_single=2, orders=(2,))


@pytest.fixture(scope="session")
def spec_free() -> SystemSpec:
    return free_system(seed=5, dim_single=2)
