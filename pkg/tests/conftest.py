import os

import pytest
from hypothesis import HealthCheck, settings

from polarwave.model import SystemParams

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

#: wave number used throughout the experiment sweeps, 1/Angstrom
K_SMALL = 1e-6


@pytest.fixture
def chain() -> SystemParams:
    """Reference chain with the 1 mm fiber; cutoff resonant at k = 0."""
    return SystemParams(l_fiber=1e7)


@pytest.fixture
def at_k(chain: SystemParams) -> SystemParams:
    """Same chain with the photon resonant at the working wave number."""
    return chain.with_detuning(0.0, K_SMALL)
