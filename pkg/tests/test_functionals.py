import math

import numpy as np
import pytest

from radnls import ModelParams, RadialField, build_grid, functionals, h1_distance, rescale
from radnls.errors import GridMismatchError, ParameterError
from radnls.field import radial_decreasing_bound_check
from radnls.functionals import euler_lagrange_residual, hardy_ratio
from radnls.operators import radial_operator

from conftest import random_smooth_field

# closed-form Gaussian integrals for v = exp(-r^2/2), d = 3 (computed with
# 40-digit quadrature before the build)
GAUSS3_MASS = math.pi**1.5  # 5.568327996831708
GAUSS3_G_S1 = 2 * math.pi
GAUSS3_KIN = 1.5 * math.pi**1.5
GAUSS3_P_A1 = (2 * math.pi / 3) ** 1.5  # L^3 norm cubed
GAUSS3_G_S05 = 5.695094726226156
GAUSS2_G_S05 = 3.849760110050832


def test_zero_field_all_zero(grid3, p3):
    rep = functionals(RadialField.zero(grid3), p3, omega=2.0)
    for name in ("mass", "kinetic", "potential_G", "power_Lp", "energy_E",
                 "action_S", "nehari_K", "virial_Q", "quadratic_H"):
        assert getattr(rep, name) == 0.0


def test_gaussian_oracles_d3():
    g = build_grid(3, 30.0, 2**14)
    p = ModelParams(d=3, sigma=1.0, alpha=1.0)
    rep = functionals(RadialField.gaussian(g), p, omega=0.0)
    assert rep.mass == pytest.approx(GAUSS3_MASS, rel=1e-8)
    assert rep.potential_G == pytest.approx(GAUSS3_G_S1, rel=1e-5)
    assert rep.kinetic == pytest.approx(GAUSS3_KIN, rel=1e-6)
    assert rep.power_Lp == pytest.approx(GAUSS3_P_A1, rel=1e-8)
    p05 = ModelParams(d=3, sigma=0.5, alpha=1.0)
    rep05 = functionals(RadialField.gaussian(g), p05, omega=0.0)
    assert rep05.potential_G == pytest.approx(GAUSS3_G_S05, rel=1e-6)


def test_gaussian_oracle_d2():
    g = build_grid(2, 30.0, 2**14)
    p = ModelParams(d=2, sigma=0.5, alpha=1.0)
    rep = functionals(RadialField.gaussian(g), p, omega=0.0)
    assert rep.mass == pytest.approx(math.pi, rel=1e-6)
    assert rep.potential_G == pytest.approx(GAUSS2_G_S05, rel=1e-5)


def test_assembly_identities_random_fields(grid3, p3):
    rng = np.random.default_rng(11)
    omega = 1.7
    for _ in range(20):
        v = random_smooth_field(grid3, rng, complex_valued=True)
        rep = functionals(v, p3, omega)
        a = p3.alpha
        scale = max(1.0, abs(rep.kinetic), abs(rep.potential_G), rep.power_Lp)
        assert abs(rep.energy_E - (rep.kinetic / 2 - rep.potential_G / 2 - rep.power_Lp / (a + 2))) <= 1e-12 * scale
        assert abs(rep.action_S - (rep.energy_E + omega * rep.mass / 2)) <= 1e-12 * scale
        assert abs(rep.nehari_K - (rep.kinetic - rep.potential_G + omega * rep.mass - rep.power_Lp)) <= 1e-12 * scale
        assert abs(rep.virial_Q - (rep.kinetic - p3.sigma / 2 * rep.potential_G - p3.beta / (a + 2) * rep.power_Lp)) <= 1e-12 * scale
        assert abs(rep.quadratic_H - (rep.kinetic - rep.potential_G + omega * rep.mass)) <= 1e-12 * scale


def test_nehari_virial_combination_identity(grid3, p3):
    # sigma*K - (sigma+1)*Q assembled from the stored pieces two ways
    rng = np.random.default_rng(5)
    v = random_smooth_field(grid3, rng)
    rep = functionals(v, p3, omega=0.9)
    s, b, a = p3.sigma, p3.beta, p3.alpha
    combo = s * rep.nehari_K - (s + 1) * rep.virial_Q
    direct = (
        (s - (s + 1)) * rep.kinetic
        - s * rep.potential_G
        + s * 0.9 * rep.mass
        + (s + 1) * s / 2 * rep.potential_G
        + ((s + 1) * b / (a + 2) - s) * rep.power_Lp
    )
    assert combo == pytest.approx(direct, abs=1e-12 * max(1.0, abs(combo)))


def test_scaling_laws_resolved_gaussian():
    g = build_grid(3, 40.0, 2**15)
    p = ModelParams(d=3, sigma=0.5, alpha=1.0)
    v = RadialField.gaussian(g)
    base = functionals(v, p, 0.0)
    for lam in (0.5, 0.8, 1.3, 2.0):
        rep = functionals(rescale(v, lam), p, 0.0)
        assert rep.mass == pytest.approx(base.mass, rel=1e-6)
        assert rep.kinetic == pytest.approx(lam**2 * base.kinetic, rel=1e-4)
        assert rep.potential_G == pytest.approx(lam**p.sigma * base.potential_G, rel=1e-4)
        assert rep.power_Lp == pytest.approx(lam**p.beta * base.power_Lp, rel=1e-4)


def test_rescale_identity_and_warning():
    g = build_grid(3, 12.0, 2048)
    v = RadialField.gaussian(g, width=3.0)
    assert rescale(v, 1.0) is v
    with pytest.warns(UserWarning, match="mass leaves the grid"):
        rescale(v, 0.25)


def test_h1_distance_properties(grid3):
    rng = np.random.default_rng(3)
    u = random_smooth_field(grid3, rng, complex_valued=True)
    v = random_smooth_field(grid3, rng, complex_valued=True)
    w = random_smooth_field(grid3, rng, complex_valued=True)
    zero = RadialField.zero(grid3)
    assert h1_distance(u, u) == 0.0
    op = radial_operator(grid3)
    assert h1_distance(u, zero) ** 2 == pytest.approx(
        op.mass(u.values) + op.kinetic(u.values), rel=1e-12
    )
    assert h1_distance(u, w) <= h1_distance(u, v) + h1_distance(v, w) + 1e-12
    other = build_grid(3, 30.0, 4096)
    with pytest.raises(GridMismatchError):
        h1_distance(u, RadialField.zero(other))


def test_gradient_check_directional_derivative(grid3, p3):
    # directional derivative of E along a perturbation matches the assembled
    # Euler-Lagrange residual via central differences
    rng = np.random.default_rng(7)
    v = random_smooth_field(grid3, rng)
    delta = random_smooth_field(grid3, rng)
    op = radial_operator(grid3, p3.sigma)

    def E(vals):
        return (
            0.5 * op.kinetic(vals)
            - 0.5 * op.potential_G(vals, p3.coupling)
            - op.power_lp(vals, p3.alpha) / (p3.alpha + 2)
        )

    eps = 1e-6
    fd = (E(v.values + eps * delta.values) - E(v.values - eps * delta.values)) / (2 * eps)
    res = euler_lagrange_residual(v, p3, omega=0.0)
    inner = float(np.real(grid3.w @ (res * np.conj(delta.values))))
    assert fd == pytest.approx(inner, rel=1e-4)


def test_hardy_ratio_bounded_over_family(grid3, p3):
    rng = np.random.default_rng(19)
    ratios = []
    for _ in range(100):
        v = random_smooth_field(grid3, rng)
        ratios.append(hardy_ratio(v, p3))
    fitted = max(ratios)
    assert np.isfinite(fitted) and fitted > 0
    assert all(r <= fitted for r in ratios)
    # the ratio is exactly dilation-invariant, which is what makes a single
    # constant possible
    v = RadialField.gaussian(grid3)
    assert hardy_ratio(v, p3) == pytest.approx(
        hardy_ratio(rescale(v, 1.7), p3), rel=1e-3
    )


def test_radial_decreasing_bound():
    g = build_grid(3, 20.0, 4096)
    bump = RadialField(g, 1.0 / (1.0 + g.r**2) ** 2)
    verdict = radial_decreasing_bound_check(bump)
    assert verdict.monotone and verdict.holds
    zero = radial_decreasing_bound_check(RadialField.zero(g))
    assert zero.monotone and zero.holds
    increasing = RadialField(g, g.r / g.r_max)
    verdict2 = radial_decreasing_bound_check(increasing)
    assert not verdict2.monotone


def test_field_validation(grid3):
    with pytest.raises(ParameterError):
        RadialField(grid3, np.full(grid3.n, np.nan))
    with pytest.raises(ParameterError):
        RadialField(grid3, np.ones(grid3.n - 1))


def test_dimension_mismatch(grid2, p3):
    with pytest.raises(GridMismatchError):
        functionals(RadialField.zero(grid2), p3, 0.0)
