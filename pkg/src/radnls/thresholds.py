"""Mass-supercritical dichotomy machinery: invariant-set membership, the
second-variation criterion along dilations, the threshold frequency search,
the key inequality, and the monotone auxiliary functions behind its proof.
"""

from dataclasses import dataclass

import numpy as np

from .elliptic import GroundStateResult, minimize_action
from .errors import ParameterError, RadnlsError
from .field import RadialField, rescale
from .functionals import functionals
from .grid import RadialGrid
from .params import ModelParams

BOUNDARY_BAND = 1e-8

VERDICT_KMINUS = "Kminus"
VERDICT_KPLUS = "Kplus"
VERDICT_NEITHER = "neither"


@dataclass(frozen=True)
class SetMembership:
    in_mass_ball: bool
    below_action: bool
    nehari_negative: bool
    virial_sign: int
    verdict: str
    margins: dict
    boundary: dict


def classify(
    v: RadialField, p: ModelParams, omega: float, gs: GroundStateResult
) -> SetMembership:
    """Membership of v in the invariant sets built on the ground state at omega.

    Margins within 1e-8 (relative to the comparison scale) of an inequality
    boundary are flagged; a boundary-flagged strict inequality does not count
    as satisfied, and a virial margin inside the band gives virial_sign = 0.
    """
    rep = functionals(v, p, omega)
    if rep.mass == 0.0:
        raise ParameterError("cannot classify the zero field")
    gs_rep = gs.report
    mass_margin = np.sqrt(gs_rep.mass) - np.sqrt(rep.mass)
    action_margin = gs_rep.action_S - rep.action_S
    nehari_margin = -rep.nehari_K
    q = rep.virial_Q

    band_mass = BOUNDARY_BAND * (1.0 + np.sqrt(gs_rep.mass))
    band_action = BOUNDARY_BAND * (1.0 + abs(gs_rep.action_S))
    band_nehari = BOUNDARY_BAND * (1.0 + abs(rep.kinetic))
    band_q = BOUNDARY_BAND * (1.0 + abs(rep.kinetic))

    in_ball = mass_margin >= -band_mass
    below = action_margin > band_action
    kneg = nehari_margin > band_nehari
    if q > band_q:
        vsign = 1
    elif q < -band_q:
        vsign = -1
    else:
        vsign = 0

    if in_ball and below and kneg and vsign == -1:
        verdict = VERDICT_KMINUS
    elif in_ball and below and kneg and vsign == +1:
        verdict = VERDICT_KPLUS
    else:
        verdict = VERDICT_NEITHER
    return SetMembership(
        in_mass_ball=in_ball,
        below_action=below,
        nehari_negative=kneg,
        virial_sign=vsign,
        verdict=verdict,
        margins={
            "mass": float(mass_margin),
            "action": float(action_margin),
            "nehari": float(nehari_margin),
            "virial": float(q),
        },
        boundary={
            "mass": bool(abs(mass_margin) < band_mass),
            "action": bool(abs(action_margin) < band_action),
            "nehari": bool(abs(nehari_margin) < band_nehari),
            "virial": bool(vsign == 0),
        },
    )


def b_omega_member(v: RadialField, p: ModelParams, omega: float, gs: GroundStateResult) -> bool:
    """Membership in the variant set where K_omega(v) < 0 is replaced by
    ||v||_{alpha+2} > ||phi||_{alpha+2}; provably the same set as Kminus."""
    rep = functionals(v, p, omega)
    gs_rep = gs.report
    band = BOUNDARY_BAND * (1.0 + abs(rep.kinetic))
    return bool(
        np.sqrt(rep.mass) <= np.sqrt(gs_rep.mass) + BOUNDARY_BAND * (1.0 + np.sqrt(gs_rep.mass))
        and rep.action_S < gs_rep.action_S - BOUNDARY_BAND * (1.0 + abs(gs_rep.action_S))
        and rep.power_Lp ** (1.0 / (p.alpha + 2)) > gs_rep.power_Lp ** (1.0 / (p.alpha + 2))
        and rep.virial_Q < -band
    )


def second_variation(gs: GroundStateResult, p: ModelParams) -> float:
    """d^2/dlam^2 of S_omega along the mass-preserving dilation at lam = 1:

        D = ||grad phi||^2 - sigma(sigma-1)/2 G(phi) - beta(beta-1)/(alpha+2) ||phi||^{a+2}.
    """
    rep = gs.report
    beta = p.beta
    return (
        rep.kinetic
        - 0.5 * p.sigma * (p.sigma - 1) * rep.potential_G
        - beta * (beta - 1) / (p.alpha + 2) * rep.power_Lp
    )


@dataclass(frozen=True)
class Omega0Result:
    omega0: float
    flag: str  # "bisected" | "threshold_below_bracket"
    D_at_omega0: float


def find_omega0(
    p: ModelParams,
    bracket: tuple,
    grid: RadialGrid | None = None,
    rel_tol: float = 1e-6,
) -> Omega0Result:
    """Smallest omega in the bracket with D(omega) <= 0, by bisection.

    D is evaluated on freshly minimized ground states.  If D <= 0 already at
    the left end, returns it flagged "threshold_below_bracket"; if D > 0 at
    both ends the threshold is not bracketed and an error is raised.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ParameterError(f"invalid bracket {bracket}")

    def D_of(omega):
        gs = minimize_action(p, omega, grid)
        return second_variation(gs, p), gs

    D_lo, _ = D_of(lo)
    if D_lo <= 0:
        return Omega0Result(omega0=lo, flag="threshold_below_bracket", D_at_omega0=D_lo)
    D_hi, _ = D_of(hi)
    if D_hi > 0:
        raise RadnlsError(
            f"D > 0 on the whole bracket: D({lo:g}) = {D_lo:g}, D({hi:g}) = {D_hi:g}"
        )
    while (hi - lo) > rel_tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        D_mid, _ = D_of(mid)
        if D_mid <= 0:
            hi = mid
        else:
            lo = mid
    D_final, _ = D_of(hi)
    return Omega0Result(omega0=hi, flag="bisected", D_at_omega0=D_final)


@dataclass(frozen=True)
class KeyEstimateVerdict:
    applicable: bool
    holds: bool
    lhs: float
    rhs: float
    reason: str


def key_estimate_check(
    v: RadialField, p: ModelParams, omega: float, gs: GroundStateResult
) -> KeyEstimateVerdict:
    """Check Q(v) <= 2 (S_omega(v) - S_omega(phi)) on the admissible cone.

    Preconditions (each with 1e-8 slack): ||v|| <= ||phi||, K_omega(v) <= 0,
    Q(v) <= 0, and D(omega) <= 0 at the ground state.  When any precondition
    fails the verdict is "inapplicable", not a failure.
    """
    rep = functionals(v, p, omega)
    gs_rep = gs.report
    slack = BOUNDARY_BAND * (1.0 + abs(rep.kinetic))
    if second_variation(gs, p) > 0:
        return KeyEstimateVerdict(False, False, 0.0, 0.0, "D(omega) > 0")
    if np.sqrt(rep.mass) > np.sqrt(gs_rep.mass) + BOUNDARY_BAND * (1 + np.sqrt(gs_rep.mass)):
        return KeyEstimateVerdict(False, False, 0.0, 0.0, "mass above ||phi||")
    if rep.nehari_K > slack:
        return KeyEstimateVerdict(False, False, 0.0, 0.0, "K_omega(v) > 0")
    if rep.virial_Q > slack:
        return KeyEstimateVerdict(False, False, 0.0, 0.0, "Q(v) > 0")
    lhs = rep.virial_Q
    rhs = 2.0 * (rep.action_S - gs_rep.action_S)
    scale = 1.0 + max(abs(lhs), abs(rhs))
    return KeyEstimateVerdict(True, lhs <= rhs + BOUNDARY_BAND * scale, lhs, rhs, "")


@dataclass(frozen=True)
class MonotoneVerdict:
    passed: bool
    g2_min: float
    g1_max: float
    g_min: float
    g1_at_1: float
    g2_at_1: float


def monotone_lemma_check(sigma: float, beta: float, n_grid: int = 10_000) -> MonotoneVerdict:
    """Grid check of the three monotonicity facts behind the key estimate.

    On lam in (0, 1):
        g2 = (2-sigma) lam^(beta-sigma) - (beta-sigma) lam^(2-sigma) + beta - 2 >= 0,
        g1 = 2 sigma (2-sigma) lam^beta - sigma beta (beta-sigma) lam^2
             + 2 beta (beta-2) lam^sigma - (beta-sigma)(beta-2)(2-sigma) <= 0,
    and the ratio function g built from them stays >= 0 (it vanishes at 1).
    """
    if not (0 < sigma < 2 < beta):
        raise ParameterError(f"requires 0 < sigma < 2 < beta, got sigma={sigma}, beta={beta}")
    lam = np.arange(1, n_grid) / n_grid
    g2 = (2 - sigma) * lam ** (beta - sigma) - (beta - sigma) * lam ** (2 - sigma) + beta - 2
    g1 = (
        2 * sigma * (2 - sigma) * lam**beta
        - sigma * beta * (beta - sigma) * lam**2
        + 2 * beta * (beta - 2) * lam**sigma
        - (beta - sigma) * (beta - 2) * (2 - sigma)
    )
    num = (2 - sigma * lam ** (2 - sigma)) * (2 * lam**beta - beta * lam**2 - 2 + beta)
    den = beta * lam ** (beta - sigma) * (sigma * lam**2 - 2 * lam**sigma - sigma + 2)
    g = num / den - lam ** (2 - beta) - (beta - sigma - 2) / sigma
    g2_at_1 = (2 - sigma) - (beta - sigma) + beta - 2  # exactly 0 in exact arithmetic
    g1_at_1 = (
        2 * sigma * (2 - sigma)
        - sigma * beta * (beta - sigma)
        + 2 * beta * (beta - 2)
        - (beta - sigma) * (beta - 2) * (2 - sigma)
    )
    tol = 1e-12
    passed = bool(np.min(g2) >= -tol and np.max(g1) <= tol and np.min(g) >= -tol)
    return MonotoneVerdict(
        passed=passed,
        g2_min=float(np.min(g2)),
        g1_max=float(np.max(g1)),
        g_min=float(np.min(g)),
        g1_at_1=float(g1_at_1),
        g2_at_1=float(g2_at_1),
    )


def sample_family(
    gs: GroundStateResult,
    p: ModelParams,
    omega: float,
    n_lam: int = 10,
    n_mu: int = 10,
    include_bumps: bool = True,
):
    """Deterministic field family spanning both signs of K_omega and Q.

    Two-parameter family mu * rescale(phi, lam) over log grids, plus a few
    Gaussian bumps.  Used by the property tests and the classification CSV.
    """
    fields = []
    lams = np.exp(np.linspace(np.log(0.4), np.log(2.5), n_lam))
    mus = np.exp(np.linspace(np.log(0.3), np.log(1.0), n_mu))
    for lam in lams:
        scaled = rescale(gs.phi, float(lam))
        for mu in mus:
            fields.append(RadialField(gs.phi.grid, mu * scaled.values))
    if include_bumps:
        grid = gs.phi.grid
        for width, amp in [(0.5, 1.0), (1.0, 0.7), (2.0, 0.5), (0.8, 1.5)]:
            fields.append(RadialField.gaussian(grid, width=width, amplitude=amp))
    return fields
