import numpy as np
import pytest

from twedge import (
    ToeplitzSpec,
    build_tw_distribution,
    from_atoms,
    toeplitz_eigenvalues,
)


@pytest.fixture(scope="session")
def toeplitz_spec_50():
    return ToeplitzSpec((1.0, 0.2, 0.3), 50)


@pytest.fixture(scope="session")
def toeplitz_measure_50(toeplitz_spec_50):
    return toeplitz_eigenvalues(toeplitz_spec_50)


@pytest.fixture(scope="session")
def atoms_measure_100():
    return from_atoms([(10.0, 0.3), (1.0, 0.7)], 100)


@pytest.fixture(scope="session")
def tw_dist():
    return build_tw_distribution()


@pytest.fixture(scope="session")
def tw_dist_half_tol():
    return build_tw_distribution(tol=5e-11)


def random_measure(rng: np.random.Generator, max_atoms: int = 10):
    """Random atomic spectral measure for property tests."""
    k = int(rng.integers(1, max_atoms + 1))
    values = rng.uniform(0.2, 10.0, size=k)
    weights = rng.uniform(0.1, 1.0, size=k)
    weights = weights / weights.sum()
    from twedge import SpectralMeasure

    return SpectralMeasure(values, weights, p=max(k * 10, 1))
