import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "lab", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("lab")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def const(c):
    return lambda z: np.full(np.shape(z), float(c))


def log_inv(z):
    with np.errstate(divide="ignore"):
        return np.log(1.0 / np.abs(z))
