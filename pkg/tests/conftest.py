import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from csci.data_model import CurrentStatusSample

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_sample(rng, n, ties=False, scale=1.0):
    if ties:
        c = rng.integers(1, max(2, n // 2), size=n).astype(float)
    else:
        c = rng.exponential(scale, size=n)
    c.sort()
    d = (rng.exponential(scale, size=n) <= c).astype(np.int64)
    return CurrentStatusSample(c, d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
