import math

import numpy as np
import pytest

from radnls import build_grid
from radnls.errors import ParameterError


def test_ball_volume_d3():
    g = build_grid(3, 1.0, 10_000)
    vol = g.integrate(np.ones(g.n))
    assert abs(vol - 4 * math.pi / 3) <= 1e-6 * (4 * math.pi / 3)


def test_interval_length_d1():
    L = 7.5
    g = build_grid(1, L, 4096)
    assert abs(g.integrate(np.ones(g.n)) - 2 * L) <= 1e-6 * 2 * L


def test_r_squared_d2():
    # int_0^1 r^2 * 2 pi r dr = pi/2
    g = build_grid(2, 1.0, 10_000)
    val = g.integrate(g.r**2)
    assert abs(val - math.pi / 2) <= 1e-5 * (math.pi / 2)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_polynomial_exactness(d, k):
    g = build_grid(d, 2.0, 10_000)
    val = g.integrate(g.r**k)
    from radnls.grid import sphere_area

    exact = sphere_area(d) * g.r_max ** (d + k) / (d + k)
    assert abs(val - exact) <= 1e-5 * abs(exact)


def test_weights_positive_and_cell_centered():
    g = build_grid(3, 5.0, 64)
    assert np.all(g.w > 0)
    assert g.r[0] == pytest.approx(g.h / 2)
    assert np.all(np.diff(g.r) > 0)


def test_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        build_grid(3, 1.0, 8)
    with pytest.raises(ParameterError):
        build_grid(3, -1.0, 64)
    with pytest.raises(ParameterError):
        build_grid(0, 1.0, 64)
