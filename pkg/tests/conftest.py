import numpy as np
import pytest

from fisherqp import Grid, PhysicalConstants, density_from_samples


@pytest.fixture
def natural():
    return PhysicalConstants()


@pytest.fixture
def grid():
    return Grid(-8.0, 8.0, 4097)


def gaussian_density(grid, sigma=1.0, center=0.0, truncation_check=True):
    raw = grid.from_function(
        lambda x: np.exp(-((x - center) ** 2) / (2.0 * sigma**2))
    )
    return density_from_samples(raw, truncation_check)


def mixture_density(grid, rng, n_components=None):
    """Random Gaussian mixture that decays below the support floor at the
    walls of [-8, 8] and keeps the inter-component dips well above it."""
    k = n_components or rng.integers(1, 4)
    x = grid.x
    raw = np.zeros(grid.n)
    for _ in range(k):
        w = rng.uniform(0.2, 1.0)
        c = rng.uniform(-1.0, 1.0)
        s = rng.uniform(0.7, 0.9)
        raw += w * np.exp(-((x - c) ** 2) / (2.0 * s**2))
    return density_from_samples(grid.field(raw))


@pytest.fixture
def standard_normal(grid):
    return gaussian_density(grid)
