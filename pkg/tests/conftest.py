import numpy as np
import pytest

from fieldcomm import DisplacementGenerator, MomentumKernel, ProfileFunction

RIGHT = MomentumKernel("right")


@pytest.fixture
def triangle():
    return ProfileFunction.triangle()


@pytest.fixture
def skew():
    return ProfileFunction.skew_triangle()


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def momentum_gen(mu, profile, t, x=0.0, sign=1):
    return DisplacementGenerator(RIGHT, mu, profile, t, x, sign)


def random_profile(rng, width=1.0, n_interior=3, center=0.0):
    """Random continuous piecewise-linear profile on [center - w/2, center + w/2]."""
    xs = np.sort(rng.uniform(-0.45, 0.45, size=n_interior)) * width + center
    vs = rng.uniform(0.2, 2.0, size=n_interior)
    nodes = [(center - width / 2, 0.0)]
    nodes += list(zip(xs, vs))
    nodes += [(center + width / 2, 0.0)]
    return ProfileFunction(tuple(nodes))
