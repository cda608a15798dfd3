import math

import numpy as np
import pytest

from radnls import (
    ModelParams,
    RadialField,
    build_grid,
    find_ground_state_shooting,
    functionals,
    h1_distance,
    minimize_action,
    minimize_energy_constrained,
    nehari_project,
    pohozaev_residuals,
    shoot_radial_ode,
    solve_free_soliton,
)
from radnls.elliptic import EXIT_BLEWUP, EXIT_CROSSED, EXIT_DECAYED
from radnls.errors import (
    BracketingError,
    FrequencyThresholdError,
    ParameterError,
    SupercriticalMassError,
    UnboundedBelowError,
)
from radnls.field import sample_radial

from conftest import random_smooth_field

A_STAR_1D = math.sqrt(3.0) * math.pi / 2  # ||Q||^2 for the d=1 quintic soliton


@pytest.fixture(scope="module")
def gs_pair():
    """Shooting and descent ground states for one parameter set."""
    p = ModelParams(d=3, sigma=0.5, alpha=1.0)
    g = build_grid(3, 30.0, 2**15)
    return (
        p,
        g,
        find_ground_state_shooting(p, 1.0, g),
        minimize_action(p, 1.0, g),
    )


def test_shooting_exit_topology():
    p = ModelParams(d=3, sigma=0.5, alpha=2.0)
    g = build_grid(3, 25.0, 1024)
    _, flag_big = shoot_radial_ode(p, 2.0, 50.0, g)
    assert flag_big == EXIT_CROSSED
    _, flag_small = shoot_radial_ode(p, 2.0, 1e-3, g)
    assert flag_small == EXIT_BLEWUP


def test_quintic_sech_oracle():
    # coupling=0, d=1, alpha=4, omega=1: phi(r) = 3^(1/4) sech^(1/2)(2r)
    p = ModelParams(d=1, sigma=0.5, alpha=4.0, coupling=0.0)
    g = build_grid(1, 10.0, 4096)
    field, flag = shoot_radial_ode(p, 1.0, 3**0.25, g)
    assert flag == EXIT_DECAYED
    sel = (g.r > 0.2) & (g.r < 4.0)
    exact = 3**0.25 / np.cosh(2 * g.r[sel]) ** 0.5
    assert np.max(np.abs(np.real(field.values[sel]) - exact)) <= 1e-6


def test_shooting_certificates(gs_pair):
    _, _, gs, _ = gs_pair
    assert max(abs(r) for r in gs.pohozaev_residuals) <= 1e-6
    rep = gs.report
    scale = max(rep.kinetic, rep.potential_G, rep.mass, rep.power_Lp)
    assert abs(rep.nehari_K) <= 1e-6 * scale
    assert abs(rep.virial_Q) <= 1e-6 * scale
    assert gs.uniqueness_guaranteed  # d=3, sigma=0.5 in the guaranteed range


def test_shooting_refinement_invariance():
    # n -> 2n at fixed spacing (domain extension): the shared nodes coincide
    # bit-exactly and the converged profile must not move.  Interpolation onto
    # a halved spacing cannot certify 1e-8 near the origin because the profile
    # carries the fractional power r^(2-sigma).
    p = ModelParams(d=3, sigma=0.5, alpha=1.0)
    g1 = build_grid(3, 25.0, 2**13)
    g2 = build_grid(3, 50.0, 2**14)
    gs1 = find_ground_state_shooting(p, 1.5, g1)
    gs2 = find_ground_state_shooting(p, 1.5, g2)
    assert np.array_equal(g1.r, g2.r[: g1.n])
    truncated = RadialField(g1, gs2.phi.values[: g1.n])
    assert h1_distance(gs1.phi, truncated) <= 1e-8
    # h-refinement consistency of the invariant scalar at second order
    g3 = build_grid(3, 25.0, 2**14)
    gs3 = find_ground_state_shooting(p, 1.5, g3)
    assert gs3.action_d == pytest.approx(gs1.action_d, rel=1e-6)


def test_descent_certificates(gs_pair):
    p, _, _, gs = gs_pair
    assert gs.action_d > 0
    rep = gs.report
    # on the Nehari manifold S = alpha/(2(alpha+2)) ||phi||^{a+2}
    assert gs.action_d == pytest.approx(
        p.alpha / (2 * (p.alpha + 2)) * rep.power_Lp, rel=1e-8
    )
    assert max(abs(r) for r in gs.pohozaev_residuals) <= 1e-6


def test_cross_solver_agreement(gs_pair):
    _, _, gs_s, gs_d = gs_pair
    assert h1_distance(gs_s.phi, gs_d.phi) <= 1e-4
    assert gs_s.action_d == pytest.approx(gs_d.action_d, rel=1e-6)


def test_exponential_tail(gs_pair):
    _, g, gs, _ = gs_pair
    vals = np.real(gs.phi.values)
    omega = gs.omega
    tail = (vals < 1e-4) & (vals > 1e-10)
    r_t, v_t = g.r[tail], np.log(vals[tail])
    slope = np.polyfit(r_t, v_t, 1)[0]
    assert slope <= -math.sqrt(omega) / 2


def test_bracketing_error():
    # omega below the coercivity threshold cannot be shot
    p = ModelParams(d=3, sigma=0.5, alpha=1.0)
    g = build_grid(3, 20.0, 1024)
    with pytest.raises(FrequencyThresholdError):
        find_ground_state_shooting(p, -1.0, g)


def test_nehari_project_contracts(grid3, p3):
    rng = np.random.default_rng(31)
    omega = 1.2
    for _ in range(5):
        v = random_smooth_field(grid3, rng)
        proj = nehari_project(v, p3, omega)
        rep = functionals(proj, p3, omega)
        scale = max(rep.kinetic, rep.potential_G, rep.power_Lp, 1.0)
        assert abs(rep.nehari_K) <= 1e-10 * scale
        # fixed point
        again = nehari_project(proj, p3, omega)
        assert np.max(np.abs(again.values - proj.values)) <= 1e-10 * np.max(np.abs(proj.values))
    # homogeneity: lam0(c v) = c^(-2/alpha) * (H-ratio correction) -> closed form
    v = random_smooth_field(grid3, rng)
    rep = functionals(v, p3, omega)
    lam_v = (rep.quadratic_H / rep.power_Lp) ** (1 / p3.alpha)
    rep2 = functionals(RadialField(grid3, 2.0 * v.values), p3, omega)
    lam_2v = (rep2.quadratic_H / rep2.power_Lp) ** (1 / p3.alpha)
    assert lam_2v == pytest.approx(lam_v * 2.0 ** (2 / p3.alpha) / 2.0 ** ((p3.alpha + 2) / p3.alpha), rel=1e-10)
    with pytest.raises(ParameterError):
        nehari_project(RadialField.zero(grid3), p3, omega)


def test_minimize_constrained_contracts():
    p = ModelParams(d=2, sigma=0.5, alpha=1.0)
    g = build_grid(2, 25.0, 2**13)
    res = minimize_energy_constrained(p, 1.0, g)
    assert abs(res.report.mass - 1.0) <= 1e-10
    assert res.I_a < 0
    vals = np.real(res.v.values)
    assert np.all(vals > 0)
    assert np.all(np.diff(vals) <= 1e-12)
    assert res.el_residual <= 1e-6


def test_I_over_a_decreasing():
    p = ModelParams(d=2, sigma=0.5, alpha=1.0)
    g = build_grid(2, 25.0, 2**13)
    ratios = []
    for a in (0.5, 1.0, 2.0, 4.0):
        res = minimize_energy_constrained(p, a, g)
        ratios.append(res.I_a / a)
    assert all(ratios[i + 1] < ratios[i] for i in range(len(ratios) - 1))


def test_supercritical_errors():
    g = build_grid(1, 20.0, 1024)
    p_super = ModelParams(d=1, sigma=0.5, alpha=6.0)
    with pytest.raises(UnboundedBelowError):
        minimize_energy_constrained(p_super, 1.0, g)
    p_crit = ModelParams(d=1, sigma=0.5, alpha=4.0)
    with pytest.raises(SupercriticalMassError):
        minimize_energy_constrained(p_crit, A_STAR_1D * 1.01, g, a_star=A_STAR_1D)


def test_free_soliton_d1():
    Q, a_star = solve_free_soliton(1)
    assert abs(a_star - A_STAR_1D) <= 1e-4
    from radnls.operators import radial_operator

    op = radial_operator(Q.grid)
    mass = op.mass(Q.values)
    kin = op.kinetic(Q.values)
    P = op.power_lp(Q.values, 4.0)
    # Pohozaev chain ||Q||^2 = (2/d)||grad Q||^2 = (2/(d+2))||Q||_6^6
    assert abs(mass - 2.0 * kin) <= 1e-6 * mass
    assert abs(mass - (2.0 / 3.0) * P) <= 1e-6 * mass
    # GN equality at the optimizer: P = ((d+2)/d) kin at equal mass
    assert P == pytest.approx(3.0 * kin, rel=1e-6)


def test_pohozaev_residuals_contract(gs_pair):
    p, g, gs, _ = gs_pair
    r1, r2 = pohozaev_residuals(gs.phi, p, gs.omega)
    assert max(abs(r1), abs(r2)) <= 1e-6
    rng = np.random.default_rng(41)
    v = random_smooth_field(g, rng)
    q1, q2 = pohozaev_residuals(v, p, gs.omega)
    assert max(abs(q1), abs(q2)) > 1e-2
    with pytest.raises(ParameterError):
        pohozaev_residuals(RadialField.zero(g), p, gs.omega)
