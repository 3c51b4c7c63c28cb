import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def lowrank(rng, n, d, r):
    return rng.standard_normal((n, r)) @ rng.standard_normal((r, d))
