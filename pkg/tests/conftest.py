import numpy as np
import pytest

from spheregp import HyperparamVector, build_grid


@pytest.fixture(scope="session")
def grid_16_32():
    return build_grid(16, 32)


@pytest.fixture(scope="session")
def grid_8_16():
    return build_grid(8, 16)


@pytest.fixture
def cauchy_hp():
    return HyperparamVector(
        "cauchy", alpha=0.6, beta=0.8, sigma=0.25, gamma=0.5, nu=0.4
    )


@pytest.fixture
def matern_hp():
    return HyperparamVector("matern", alpha=0.7, beta=0.9, sigma=0.25, varpi=1.3)


def random_points(rng, size):
    """Uniform-ish points on the sphere, away from the poles."""
    colat = rng.uniform(0.05, np.pi - 0.05, size)
    lon = rng.uniform(0.0, 2.0 * np.pi, size)
    return colat, lon


class ZonalStub:
    """Duck-typed hyperparameter stand-in with an arbitrary spatial profile;
    lets tests inject kernels (constant, low-degree, indefinite, zero) that
    no Gneiting member produces."""

    def __init__(self, profile, alpha=1.0, beta=1.0, sigma=0.0):
        self._profile = profile
        self.alpha = alpha
        self.beta = beta
        self.sigma = sigma

    def spatial_phi(self, u):
        return self._profile(np.asarray(u, dtype=float))
