import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

S = np.array([[1.1, 0.0], [0.0, 0.1]])
T = np.array([[7.17, -4.41], [-4.41, 3.13]])


@pytest.fixture
def reference_pair():
    return S.copy(), T.copy()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
