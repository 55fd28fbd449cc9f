"""Shared fixtures: the reference bump corpus and session-scoped zero tables."""

import mpmath as mp
import numpy as np
import pytest

from eflab.testfn import bump
from eflab.zeta import find_zeros

mp.mp.dps = 25

#: Reference bump used throughout: one log-axis bump at mu=0.7, sigma=0.6.
G0 = bump(0.7, 0.6)

#: Fixed corpus exercising the main support geometries: the reference bump,
#: a bump covering u = 1, one living below 1 (inverse prime powers), one
#: reaching 5, 7 and 8, a scaled narrow one, and one with a complex amplitude.
CORPUS = (
    G0,
    bump(0.0, 0.5),
    bump(-0.8, 0.4),
    bump(1.8, 0.35),
    bump(0.35, 0.3, amp=2.0),
    bump(0.7, 0.25, amp=1.0 + 0.5j),
)


def random_bumps(count: int, seed: int):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        out.append(bump(rng.uniform(-1.0, 1.6), rng.uniform(0.25, 0.7),
                        amp=rng.uniform(0.5, 2.0)))
    return out


@pytest.fixture(scope="session")
def g0():
    return G0


@pytest.fixture(scope="session")
def corpus():
    return CORPUS


@pytest.fixture(scope="session")
def zeros50():
    return find_zeros(50.0)


@pytest.fixture(scope="session")
def zeros100():
    return find_zeros(100.0)


@pytest.fixture(scope="session")
def zeros200():
    return find_zeros(200.0)


@pytest.fixture(scope="session")
def zeros500():
    return find_zeros(500.0)


@pytest.fixture(scope="session")
def zeros1000():
    return find_zeros(1000.0)
