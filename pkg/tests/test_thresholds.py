import numpy as np
import pytest

from radnls import (
    ModelParams,
    RadialField,
    build_grid,
    classify,
    find_omega0,
    functionals,
    key_estimate_check,
    minimize_action,
    monotone_lemma_check,
    rescale,
    second_variation,
)
from radnls.errors import ParameterError, RadnlsError
from radnls.thresholds import (
    VERDICT_KMINUS,
    VERDICT_KPLUS,
    VERDICT_NEITHER,
    b_omega_member,
    sample_family,
)


@pytest.fixture(scope="module")
def super_gs():
    """Mass-supercritical ground state with D(omega) < 0."""
    p = ModelParams(d=3, sigma=0.5, alpha=2.0)
    g = build_grid(3, 30.0, 2**13)
    omega = 2.0
    return p, omega, minimize_action(p, omega, g)


def test_ground_state_is_neither(super_gs):
    p, omega, gs = super_gs
    mem = classify(gs.phi, p, omega, gs)
    assert mem.verdict == VERDICT_NEITHER
    assert mem.boundary["action"]  # S(v) < S(phi) fails exactly on the boundary


def test_scan_produces_kminus(super_gs):
    p, omega, gs = super_gs
    found = False
    for lam in (1.05, 1.1, 1.2, 1.4):
        mem = classify(rescale(gs.phi, lam), p, omega, gs)
        if mem.verdict == VERDICT_KMINUS:
            found = True
            rep = functionals(rescale(gs.phi, lam), p, omega)
            assert rep.nehari_K < 0 and rep.virial_Q < 0
    assert found


def test_scan_produces_kplus(super_gs):
    p, omega, gs = super_gs
    found = set()
    for v in sample_family(gs, p, omega, n_lam=14, n_mu=14):
        found.add(classify(v, p, omega, gs).verdict)
    assert VERDICT_KPLUS in found and VERDICT_KMINUS in found


def test_classifier_totality(super_gs):
    p, omega, gs = super_gs
    for v in sample_family(gs, p, omega):
        verdict = classify(v, p, omega, gs).verdict
        assert verdict in (VERDICT_KMINUS, VERDICT_KPLUS, VERDICT_NEITHER)


def test_b_omega_equivalence(super_gs):
    p, omega, gs = super_gs
    fields = sample_family(gs, p, omega, n_lam=10, n_mu=10)
    assert len(fields) >= 100
    checked = 0
    for v in fields:
        mem = classify(v, p, omega, gs)
        if any(mem.boundary.values()):
            continue
        checked += 1
        assert (mem.verdict == VERDICT_KMINUS) == b_omega_member(v, p, omega, gs)
    assert checked >= 100


def test_second_variation_fd_crosscheck(super_gs):
    p, omega, gs = super_gs
    D = second_variation(gs, p)
    eps = 1e-3

    def S_at(lam):
        return functionals(rescale(gs.phi, lam), p, omega).action_S

    fd = (S_at(1 + eps) - 2 * S_at(1.0) + S_at(1 - eps)) / eps**2
    assert D == pytest.approx(fd, rel=1e-4)


def test_second_variation_pure_power_identity():
    # with no potential the Pohozaev identities force D = d(2-beta) S_omega(phi),
    # negative for every omega in the mass-supercritical range (verified
    # symbolically before the build)
    p = ModelParams(d=1, sigma=0.5, alpha=6.0, coupling=0.0)
    g = build_grid(1, 20.0, 2**13)
    for omega in (0.5, 1.0, 2.0):
        gs = minimize_action(p, omega, g)
        D = second_variation(gs, p)
        assert D < 0
        assert D == pytest.approx(p.d * (2 - p.beta) * gs.action_d, rel=1e-6)


def test_second_variation_continuity(super_gs):
    p, _, _ = super_gs
    g = build_grid(3, 30.0, 2**13)
    omegas = np.linspace(1.0, 2.0, 5)
    Ds = [second_variation(minimize_action(p, om, g), p) for om in omegas]
    jumps = np.abs(np.diff(Ds))
    assert np.all(jumps <= 10 * np.median(jumps))


def test_find_omega0(super_gs):
    p, _, _ = super_gs
    g = build_grid(3, 30.0, 2**12)
    res = find_omega0(p, (0.45, 2.0), g, rel_tol=1e-4)
    assert res.flag == "bisected"
    assert 0.45 < res.omega0 < 1.0
    assert res.D_at_omega0 <= 1e-8
    # refinement contract: halving the tolerance moves omega0 by less than the
    # previous tolerance
    res2 = find_omega0(p, (0.45, 2.0), g, rel_tol=5e-5)
    assert abs(res2.omega0 - res.omega0) <= 1e-4 * max(1.0, res.omega0)
    # D <= 0 on the whole bracket -> flagged left end
    res3 = find_omega0(p, (1.5, 2.0), g, rel_tol=1e-4)
    assert res3.flag == "threshold_below_bracket"
    with pytest.raises(RadnlsError):
        find_omega0(ModelParams(d=3, sigma=0.5, alpha=2.0), (0.45, 0.48), g, rel_tol=1e-4)


def test_key_estimate_admissible_family(super_gs):
    p, omega, gs = super_gs
    applicable = 0
    for v in sample_family(gs, p, omega, n_lam=12, n_mu=12):
        verdict = key_estimate_check(v, p, omega, gs)
        if verdict.applicable:
            applicable += 1
            assert verdict.holds
    assert applicable >= 30


def test_key_estimate_boundary_at_ground_state(super_gs):
    p, omega, gs = super_gs
    verdict = key_estimate_check(gs.phi, p, omega, gs)
    # K = Q = 0 at phi: the estimate degenerates to 0 <= 0
    assert verdict.applicable and verdict.holds
    assert abs(verdict.lhs) <= 1e-6 * (1 + gs.report.kinetic)
    assert abs(verdict.rhs) <= 1e-6 * (1 + abs(gs.report.action_S))


def test_empty_intersection(super_gs):
    # no admissible field sits on the Q = 0 slice of the K < 0 sublevel set
    p, omega, gs = super_gs
    for v in sample_family(gs, p, omega, n_lam=25, n_mu=8):
        mem = classify(v, p, omega, gs)
        if mem.in_mass_ball and mem.below_action and mem.nehari_negative:
            assert mem.virial_sign != 0


@pytest.mark.parametrize("sigma,beta", [(0.5, 3.0), (1.0, 3.0), (1.5, 4.0)])
def test_monotone_lemma(sigma, beta):
    verdict = monotone_lemma_check(sigma, beta)
    assert verdict.passed
    assert verdict.g2_min >= -1e-12
    assert verdict.g1_max <= 1e-12
    assert verdict.g_min >= -1e-12
    assert verdict.g2_at_1 == 0.0
    assert verdict.g1_at_1 == 0.0


def test_monotone_lemma_rejects_bad_range():
    with pytest.raises(ParameterError):
        monotone_lemma_check(0.5, 1.5)


def test_classify_rejects_zero(super_gs):
    p, omega, gs = super_gs
    with pytest.raises(ParameterError):
        classify(RadialField.zero(gs.phi.grid), p, omega, gs)
