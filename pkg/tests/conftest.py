import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lambdaconvex import UNIT, LuneSpec, make_lune

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

RHO1 = math.pi / 4  # lambda-circle radius for lambda = k1 = 1


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def lune3():
    return make_lune(LuneSpec(UNIT, 1.0, 3.0))
