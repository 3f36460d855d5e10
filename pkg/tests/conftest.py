import numpy as np
import pytest

from poddmd.pdelab import build_advection1d, build_parabolic2d, integrate_full


@pytest.fixture
def rng():
    return np.random.default_rng(20160627)


@pytest.fixture(scope="session")
def advection():
    p = build_advection1d()
    return p, integrate_full(p)


@pytest.fixture(scope="session")
def parabolic():
    p = build_parabolic2d()
    return p, integrate_full(p)


@pytest.fixture(scope="session")
def parabolic_small():
    p = build_parabolic2d(nx=20)
    return p, integrate_full(p)
