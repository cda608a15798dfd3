import numpy as np
import pytest

from radnls import ModelParams, RadialField, build_grid


@pytest.fixture(scope="session")
def grid3():
    return build_grid(3, 30.0, 8192)


@pytest.fixture(scope="session")
def grid2():
    return build_grid(2, 30.0, 8192)


@pytest.fixture(scope="session")
def grid1():
    return build_grid(1, 24.0, 8192)


@pytest.fixture(scope="session")
def p3():
    return ModelParams(d=3, sigma=0.5, alpha=1.0)


def random_smooth_field(grid, rng, n_bumps=3, complex_valued=False):
    vals = np.zeros(grid.n, dtype=np.complex128)
    for _ in range(n_bumps):
        center = rng.uniform(0.0, 0.4 * grid.r_max)
        width = rng.uniform(0.4, 2.5)
        amp = rng.normal()
        if complex_valued:
            amp = amp + 1j * rng.normal()
        vals += amp * np.exp(-((grid.r - center) ** 2) / (2 * width**2))
    return RadialField(grid, vals)
