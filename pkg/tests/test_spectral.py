import numpy as np
import pytest

from radnls import ModelParams, RadialField, build_grid, eigenvalue_bound_check, ground_eigenpair
from radnls.errors import ParameterError
from radnls.spectral import rayleigh_quotient

from conftest import random_smooth_field

# oracle: for d=3, sigma=1, coupling=1 the bottom eigenfunction is exp(-r/2)
# with eigenvalue -1/4 (verified by substitution into the radial equation)
HYDROGEN_MU1 = -0.25


@pytest.fixture(scope="module")
def hydrogen_pair():
    p = ModelParams(d=3, sigma=1.0, alpha=1.0)
    g = build_grid(3, 40.0, 8192)
    return p, g, ground_eigenpair(p, g)


def test_hydrogen_eigenvalue(hydrogen_pair):
    _, _, pair = hydrogen_pair
    assert abs(pair.mu1 - HYDROGEN_MU1) <= 1e-3
    assert pair.residual <= 1e-8


def test_eigenfunction_shape(hydrogen_pair):
    p, g, pair = hydrogen_pair
    vals = np.real(pair.phi.values)
    assert np.all(vals > 0)
    assert np.all(np.diff(vals) <= 1e-12)  # radially decreasing
    from radnls.operators import radial_operator

    op = radial_operator(g, p.sigma)
    assert op.mass(pair.phi.values) == pytest.approx(1.0, abs=1e-10)
    # profile matches exp(-r/2) up to normalization
    ref = np.exp(-g.r / 2)
    ref /= np.sqrt(op.mass(ref))
    assert np.max(np.abs(vals - ref)) <= 1e-4


def test_second_order_convergence():
    p = ModelParams(d=3, sigma=1.0, alpha=1.0)
    errs = []
    for n in (2048, 4096):
        pair = ground_eigenpair(p, build_grid(3, 40.0, n))
        errs.append(abs(pair.mu1 - HYDROGEN_MU1))
    assert errs[1] <= 0.5 * errs[0]  # at least halves; measured ~quarter


def test_coupling_zero_nonnegative():
    p = ModelParams(d=3, sigma=1.0, alpha=1.0, coupling=0.0)
    pair = ground_eigenpair(p, build_grid(3, 20.0, 2048))
    assert pair.mu1 >= -1e-6


def test_monotone_in_coupling():
    g = build_grid(3, 40.0, 4096)
    mus = []
    for c in (0.5, 1.0, 2.0):
        p = ModelParams(d=3, sigma=1.0, alpha=1.0, coupling=c)
        mus.append(ground_eigenpair(p, g).mu1)
    assert mus[0] > mus[1] > mus[2]


def test_rayleigh_quotient_consistency(hydrogen_pair):
    p, _, pair = hydrogen_pair
    assert rayleigh_quotient(pair, p) == pytest.approx(pair.mu1, abs=1e-8)


def test_bound_equality_at_eigenfunction(hydrogen_pair):
    p, _, pair = hydrogen_pair
    verdict = eigenvalue_bound_check(pair.phi, pair, p)
    assert verdict.holds
    assert abs(verdict.lhs - verdict.rhs) <= 1e-8 * (1 + abs(verdict.rhs))


def test_bound_holds_for_random_fields(hydrogen_pair):
    p, g, pair = hydrogen_pair
    rng = np.random.default_rng(23)
    for _ in range(100):
        v = random_smooth_field(g, rng, complex_valued=True)
        assert eigenvalue_bound_check(v, pair, p).holds


def test_bound_rejects_zero(hydrogen_pair):
    p, g, pair = hydrogen_pair
    with pytest.raises(ParameterError):
        eigenvalue_bound_check(RadialField.zero(g), pair, p)
