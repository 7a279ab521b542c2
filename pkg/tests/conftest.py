import numpy as np
import pytest

from concidx import generate_profile, make_profile
from concidx.measure import PointMeasure


def exp_measure(rmax: float, seed: int = 42) -> PointMeasure:
    fn, text = make_profile("exp")
    return generate_profile(fn, rmax, seed, description=text)


@pytest.fixture(scope="session")
def mu4():
    return exp_measure(4.0)


@pytest.fixture(scope="session")
def mu5():
    return exp_measure(5.0)


@pytest.fixture(scope="session")
def mu6():
    return exp_measure(6.0)


@pytest.fixture(scope="session")
def mu_big():
    # ~6*10^4 atoms; shared by the trend and covering acceptance criteria
    return exp_measure(11.0)


@pytest.fixture(scope="session")
def clustered_mu():
    # hand-built measure with a tight cluster, a mid-range pair, and an
    # outlier; exercises nondegenerate covers at small beta
    rng = np.random.default_rng(2718)
    atoms = []
    for _ in range(12):
        atoms.append((complex(2.0, 0.5) + 0.03 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), 1.0))
    atoms += [
        (complex(-2.4, 0.2), 2.0),
        (complex(-2.5, 0.3), 1.0),
        (complex(0.5, 3.9), 1.5),
    ]
    return PointMeasure(atoms, 6.0, description="clustered fixture")


def random_measure(rng, count=50, rmax=8.0):
    atoms = []
    for _ in range(count):
        r = rng.uniform(1.01, rmax)
        theta = rng.uniform(0, 2 * np.pi)
        atoms.append((r * np.exp(1j * theta), rng.uniform(0.2, 3.0)))
    return PointMeasure(atoms, rmax, description="random test measure")
