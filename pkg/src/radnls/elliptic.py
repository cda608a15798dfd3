"""Stationary solvers: shooting, Nehari-projected action descent, normalized
gradient flow under a mass constraint, and the free (no-potential) soliton.

Two independent routes to the ground state are kept deliberately separate so
they can cross-validate each other: `find_ground_state_shooting` integrates
the radial ODE outward and bisects on phi(0); `minimize_action` descends the
action on the discrete Nehari manifold.  Pohozaev, Nehari and virial residuals
certify every converged profile.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    BracketingError,
    ConvergenceFailure,
    FrequencyThresholdError,
    IntegrationFailure,
    ParameterError,
    SupercriticalMassError,
    UnboundedBelowError,
)
from .field import RadialField
from .functionals import FunctionalReport, assemble_report, functionals
from .grid import RadialGrid, build_grid
from .kernels import solve_tridiag
from .operators import RadialOperator, radial_operator
from .params import ModelParams

DEFAULT_N = 2**14
DEFAULT_R_MAX = 40.0

EXIT_CROSSED = "crossed_zero"
EXIT_BLEWUP = "blew_up"
EXIT_DECAYED = "decayed"


@dataclass(frozen=True)
class GroundStateResult:
    phi: RadialField
    omega: float
    action_d: float
    report: FunctionalReport
    pohozaev_residuals: tuple
    iterations: int
    method: str
    uniqueness_guaranteed: bool


@dataclass(frozen=True)
class ConstrainedMinResult:
    v: RadialField
    a: float
    I_a: float
    lagrange_omega: float
    report: FunctionalReport
    flow_steps: int
    el_residual: float


@lru_cache(maxsize=64)
def _mu1_cached(grid: RadialGrid, sigma: float, coupling: float) -> float:
    from .spectral import ground_eigenpair

    if coupling == 0.0:
        return 0.0  # -Lap is nonnegative on the truncated domain
    p = ModelParams(d=grid.d, sigma=sigma, alpha=4.0 / (3 * grid.d), coupling=coupling)
    return ground_eigenpair(p, grid).mu1


def mu1_of(p: ModelParams, grid: RadialGrid) -> float:
    return _mu1_cached(grid, p.sigma, p.coupling)


def _require_above_threshold(p: ModelParams, omega: float, grid: RadialGrid) -> float:
    mu1 = mu1_of(p, grid)
    if omega <= -mu1:
        raise FrequencyThresholdError(
            f"omega = {omega:g} must exceed -mu1 = {-mu1:g} for this potential"
        )
    return mu1


# ----------------------------------------------------------------------
# shooting
# ----------------------------------------------------------------------

def _integrate_shot(p: ModelParams, omega: float, phi0: float, r_end: float, rtol: float = 1e-12):
    """Integrate the radial ODE outward from r0 = 1e-6.

    The start uses the two-term local expansion
        phi(r) = phi0 (1 - c r^(2-sigma)/((2-sigma)(d-sigma))) + b r^2,
        b = phi0 (omega - phi0^alpha) / (2 d),
    whose singular r^(2-sigma) coefficient is forced by balancing the
    r^(-sigma) terms of the equation (checked against the d=3, sigma=1
    closed form e^(-r/2), whose expansion is 1 - r/2 + ...).
    """
    d, sigma, alpha, c = p.d, p.sigma, p.alpha, p.coupling
    r0 = 1e-6
    c1 = c / ((2 - sigma) * (d - sigma))
    b = phi0 * (omega - phi0**alpha) / (2 * d)
    y0 = [
        phi0 * (1 - c1 * r0 ** (2 - sigma)) + b * r0**2,
        phi0 * (-(2 - sigma) * c1 * r0 ** (1 - sigma)) + 2 * b * r0,
    ]

    def rhs(r, y):
        phi, dphi = y
        return [
            dphi,
            -(d - 1) / r * dphi - (c * r ** (-sigma) - omega) * phi - abs(phi) ** alpha * phi,
        ]

    def ev_cross(r, y):
        return y[0]

    ev_cross.terminal = True
    ev_cross.direction = -1

    def ev_grow(r, y):
        # stationary point inside the coercive tail region => growing branch
        if omega - c * r ** (-sigma) - abs(y[0]) ** alpha > 0:
            return y[1]
        return -1.0

    ev_grow.terminal = True
    ev_grow.direction = 1

    def ev_big(r, y):
        return abs(y[0]) - 10.0 * phi0

    ev_big.terminal = True
    ev_big.direction = 1

    sol = solve_ivp(
        rhs,
        (r0, r_end),
        y0,
        method="RK45",
        rtol=rtol,
        atol=max(rtol * 1e-2, 1e-14) * phi0,
        dense_output=True,
        events=[ev_cross, ev_grow, ev_big],
    )
    if not sol.success and sol.status == -1:
        raise IntegrationFailure(f"ODE step failure near r = {sol.t[-1]:g}", radius=sol.t[-1])
    if sol.t_events[0].size:
        flag = EXIT_CROSSED
    elif sol.t_events[1].size or sol.t_events[2].size:
        flag = EXIT_BLEWUP
    else:
        flag = EXIT_DECAYED
    return flag, sol


def _sample_with_tail(sol, grid: RadialGrid, phi0: float, omega: float) -> np.ndarray:
    """Sample the dense ODE solution on the grid, grafting a clean exponential
    tail once the amplitude falls below 1e-10 phi(0) (past that point the
    bisected trajectory eventually peels off the separatrix)."""
    r_reach = min(sol.t[-1], grid.r_max)
    vals = np.zeros(grid.n)
    inside = grid.r < r_reach
    vals[inside] = sol.sol(grid.r[inside])[0]
    floor = 1e-10 * phi0
    peak = int(np.argmax(vals))
    cut = None
    for j in range(peak + 1, grid.n):
        if vals[j] <= floor or (not inside[j]) or vals[j] > vals[j - 1]:
            cut = j
            break
    if cut is not None and cut >= 2:
        k = np.log(max(vals[cut - 2], 1e-300) / max(vals[cut - 1], 1e-300)) / grid.h
        if not np.isfinite(k) or k <= 0:
            k = np.sqrt(max(omega, 1e-12))
        decay = np.exp(-k * (grid.r[cut:] - grid.r[cut - 1]))
        vals[cut:] = vals[cut - 1] * decay
    return vals


def shoot_radial_ode(
    p: ModelParams, omega: float, phi0: float, grid: RadialGrid
):
    """One outward shot; returns (RadialField, exit flag).

    Exit flags: 'crossed_zero' (overshoot), 'blew_up' (growing branch,
    undershoot), 'decayed'.
    """
    if phi0 <= 0:
        raise ParameterError(f"phi0 must be positive, got {phi0}")
    _require_above_threshold(p, omega, grid)
    flag, sol = _integrate_shot(p, omega, phi0, grid.r_max)
    vals = np.zeros(grid.n)
    r_reach = min(sol.t[-1], grid.r_max)
    inside = grid.r < r_reach
    vals[inside] = sol.sol(grid.r[inside])[0]
    return RadialField(grid, vals), flag


def find_ground_state_shooting(
    p: ModelParams,
    omega: float,
    grid: RadialGrid | None = None,
    strict: bool = True,
) -> GroundStateResult:
    """Ground state by bisection on phi(0) between growing and crossing shots."""
    if grid is None:
        grid = build_grid(p.d, DEFAULT_R_MAX, DEFAULT_N)
    _require_above_threshold(p, omega, grid)

    lo = hi = None
    flags = {}
    for phi0 in np.logspace(-4, 4, 81):
        flag, _ = _integrate_shot(p, omega, phi0, grid.r_max, rtol=1e-6)
        flags[phi0] = flag
        if flag == EXIT_BLEWUP:
            lo = phi0
        elif flag == EXIT_CROSSED and lo is not None:
            hi = phi0
            break
    if lo is None or hi is None:
        raise BracketingError(
            f"no undershoot/overshoot bracket for phi0 in [1e-4, 1e4]; scan flags: "
            f"{sorted(set(flags.values()))}"
        )
    iterations = 0
    while (hi - lo) > 1e-12 * hi:
        iterations += 1
        mid = 0.5 * (lo + hi)
        flag, _ = _integrate_shot(p, omega, mid, grid.r_max)
        if flag == EXIT_CROSSED:
            hi = mid
        else:
            lo = mid
        if iterations > 200:
            break
    phi0 = 0.5 * (lo + hi)
    _, sol = _integrate_shot(p, omega, phi0, grid.r_max)
    vals = _sample_with_tail(sol, grid, phi0, omega)
    phi = RadialField(grid, vals)
    return _package_ground_state(
        phi, p, omega, iterations, "shooting", strict=strict
    )


def _package_ground_state(phi, p, omega, iterations, method, strict):
    rep = functionals(phi, p, omega)
    res = pohozaev_residuals(phi, p, omega)
    scale = max(abs(rep.kinetic), abs(rep.potential_G), abs(omega) * rep.mass, rep.power_Lp)
    k_rel = abs(rep.nehari_K) / scale
    q_rel = abs(rep.virial_Q) / scale
    if strict and max(k_rel, q_rel, abs(res[0]), abs(res[1])) > 1e-6:
        raise ConvergenceFailure(
            f"{method} ground state residuals exceed 1e-6; refine the grid",
            diagnostics={"K": k_rel, "Q": q_rel, "pohozaev": res},
        )
    unique = p.d >= 3 and 0 < p.sigma < 1
    return GroundStateResult(
        phi=phi,
        omega=omega,
        action_d=rep.action_S,
        report=rep,
        pohozaev_residuals=res,
        iterations=iterations,
        method=method,
        uniqueness_guaranteed=unique,
    )


# ----------------------------------------------------------------------
# Nehari projection and action descent
# ----------------------------------------------------------------------

def nehari_project(v: RadialField, p: ModelParams, omega: float) -> RadialField:
    """Scale v onto the Nehari manifold: lam0 = (H_omega(v)/||v||^{a+2}_{a+2})^(1/alpha)."""
    rep = functionals(v, p, omega)
    if rep.mass == 0.0:
        raise ParameterError("cannot project the zero field")
    if rep.quadratic_H <= 0.0:
        raise FrequencyThresholdError(
            f"H_omega(v) = {rep.quadratic_H:g} <= 0; omega is below the coercivity threshold"
        )
    lam0 = (rep.quadratic_H / rep.power_Lp) ** (1.0 / p.alpha)
    return RadialField(v.grid, lam0 * v.values)


def _nehari_lam(op: RadialOperator, v, p: ModelParams, omega: float) -> float:
    H = op.kinetic(v) - op.potential_G(v, p.coupling) + omega * op.mass(v)
    P = op.power_lp(v, p.alpha)
    if H <= 0 or P <= 0:
        raise FrequencyThresholdError(f"H_omega = {H:g} <= 0 during descent")
    return (H / P) ** (1.0 / p.alpha)


def minimize_action(
    p: ModelParams,
    omega: float,
    grid: RadialGrid | None = None,
    tol: float = 1e-11,
    max_iter: int = 5000,
    strict: bool = True,
) -> GroundStateResult:
    """Descend S_omega with a Nehari projection after every step.

    The descent direction is the preconditioned action gradient
    (A + omega)^(-1) grad S; a unit step is the Picard map
    v -> (A + omega)^(-1) v^(alpha+1), damped by backtracking whenever the
    projected action fails to decrease.
    """
    if grid is None:
        grid = build_grid(p.d, DEFAULT_R_MAX, DEFAULT_N)
    _require_above_threshold(p, omega, grid)
    op = radial_operator(grid, p.sigma)

    def S_of(v):
        return (
            0.5 * op.kinetic(v)
            - 0.5 * op.potential_G(v, p.coupling)
            + 0.5 * omega * op.mass(v)
            - op.power_lp(v, p.alpha) / (p.alpha + 2)
        )

    v = np.exp(-grid.r**2 / 2.0)
    v = v * _nehari_lam(op, v, p, omega)
    S = S_of(v)
    theta = 1.0
    it = 0
    ab = op.banded(omega, 1.0, p.coupling)
    while it < max_iter:
        it += 1
        picard = solve_tridiag(ab[2, :-1], ab[1], ab[0, 1:], np.abs(v) ** p.alpha * v)
        accepted = False
        for _ in range(50):
            vn = (1 - theta) * v + theta * picard
            vn = vn * _nehari_lam(op, vn, p, omega)
            Sn = S_of(vn)
            if np.isfinite(Sn) and Sn <= S + 1e-15 * max(1.0, abs(S)):
                accepted = True
                break
            theta *= 0.5
        if not accepted:
            break
        step = np.sqrt(op.mass(vn - v) + op.kinetic(vn - v))
        v, S = vn, Sn
        theta = min(theta * 1.4, 1.0)
        if step < tol * max(1.0, np.sqrt(op.mass(v))):
            break
    else:
        raise ConvergenceFailure(
            "action descent hit the iteration limit",
            diagnostics={"S": S, "iterations": it},
        )
    phi = RadialField(grid, v)
    return _package_ground_state(phi, p, omega, it, "nehari_descent", strict=strict)


# ----------------------------------------------------------------------
# constrained minimization (normalized gradient flow)
# ----------------------------------------------------------------------

def _el_multiplier(op: RadialOperator, v, p: ModelParams):
    """Least-squares multiplier: fit (A v - v^(alpha+1)) against -v where |v| is supported."""
    res0 = op.apply_linear(v, 0.0, p.coupling) - np.abs(v) ** p.alpha * v
    m = np.abs(v) > 1e-8 * np.max(np.abs(v))
    num = -float((op.grid.w[m] * res0[m]) @ v[m])
    den = float(op.grid.w[m] @ (v[m] ** 2))
    om = num / den
    resid = res0 + om * v
    rel = np.sqrt(op.mass(resid)) / max(np.sqrt(op.mass(np.abs(v) ** p.alpha * v)), 1e-300)
    return om, rel


def minimize_energy_constrained(
    p: ModelParams,
    a: float,
    grid: RadialGrid | None = None,
    v0: RadialField | None = None,
    tol_res: float = 1e-6,
    tol_dE: float = 1e-12,
    max_iter: int = 200_000,
    a_star: float | None = None,
) -> ConstrainedMinResult:
    """Minimize E over the sphere ||v||^2 = a by a normalized gradient flow.

    Semi-implicit imaginary-time steps treat the linear part and the running
    multiplier estimate implicitly, so the exact discrete Euler-Lagrange
    solution is a fixed point at any step size; each step renormalizes the
    mass exactly and is only accepted when the energy decreases.
    """
    if a <= 0:
        raise ParameterError(f"mass constraint a must be positive, got {a}")
    if p.mass_supercritical:
        raise UnboundedBelowError(
            f"alpha = {p.alpha:g} > 4/d = {4 / p.d:g}: energy unbounded below on the mass sphere"
        )
    if p.mass_critical:
        if a_star is None:
            a_star = free_soliton_mass(p.d)
        if a >= a_star:
            raise SupercriticalMassError(
                f"a = {a:g} >= critical mass a* = {a_star:g}: no minimizer exists"
            )
    if grid is None:
        grid = build_grid(p.d, DEFAULT_R_MAX, DEFAULT_N)
    op = radial_operator(grid, p.sigma)

    def E_of(v):
        return (
            0.5 * op.kinetic(v)
            - 0.5 * op.potential_G(v, p.coupling)
            - op.power_lp(v, p.alpha) / (p.alpha + 2)
        )

    if v0 is not None:
        v = np.maximum(np.real(v0.values), 0.0)
    else:
        v = np.exp(-grid.r**2 / 2.0)
    v = v * np.sqrt(a / op.mass(v))
    E = E_of(v)
    om, rel = _el_multiplier(op, v, p)
    tau = 0.5 * grid.h**2
    tau_cap = 5.0
    it = 0
    dE = np.inf
    while it < max_iter:
        it += 1
        rhs = v + tau * np.abs(v) ** p.alpha * v
        ab = op.banded(1.0 + tau * om, tau, p.coupling)
        vn = solve_tridiag(ab[2, :-1], ab[1], ab[0, 1:], rhs)
        vn *= np.sqrt(a / op.mass(vn))
        En = E_of(vn)
        if not np.isfinite(En) or En > E + 1e-15 * max(1.0, abs(E)):
            tau = max(tau * 0.5, 1e-10)
            continue
        dE = E - En
        v, E = vn, En
        tau = min(tau * 1.4, tau_cap)
        if it % 25 == 0 or dE < tol_dE * max(1.0, abs(E)):
            om, rel = _el_multiplier(op, v, p)
            if rel < tol_res and dE < tol_dE * max(1.0, abs(E)):
                break
    else:
        raise ConvergenceFailure(
            "normalized gradient flow hit the iteration limit",
            diagnostics={"E": E, "residual": rel, "dE": dE},
        )
    rep = assemble_report(
        op.mass(v), op.kinetic(v), op.potential_G(v, p.coupling), op.power_lp(v, p.alpha), p, om
    )
    if rep.energy_E >= 0:
        raise ConvergenceFailure(
            "constrained minimizer has nonnegative energy; expected I(a) < 0",
            diagnostics={"E": rep.energy_E},
        )
    return ConstrainedMinResult(
        v=RadialField(grid, v),
        a=a,
        I_a=rep.energy_E,
        lagrange_omega=om,
        report=rep,
        flow_steps=it,
        el_residual=rel,
    )


# ----------------------------------------------------------------------
# free soliton (mass-critical, no potential)
# ----------------------------------------------------------------------

@lru_cache(maxsize=8)
def _free_soliton_cached(d: int, r_max: float, n: int):
    p = ModelParams(d=d, sigma=min(2.0, d) / 2.0, alpha=4.0 / d, coupling=0.0)
    grid = build_grid(d, r_max, n)
    gs = find_ground_state_shooting(p, 1.0, grid, strict=False)
    rep = gs.report
    a_star = rep.mass
    chain1 = abs(rep.mass - 2.0 / d * rep.kinetic) / rep.mass
    chain2 = abs(rep.mass - 2.0 / (d + 2) * rep.power_Lp) / rep.mass
    if max(chain1, chain2) > 1e-6:
        raise ConvergenceFailure(
            "free-soliton Pohozaev chain violated; refine the grid",
            diagnostics={"chain": (chain1, chain2)},
        )
    return gs.phi, a_star


def solve_free_soliton(d: int, r_max: float = 30.0, n: int = 2**15):
    """Positive radial solution of Lap Q - Q + Q^(4/d+1) = 0 and a* = ||Q||^2."""
    if not (isinstance(d, int) and d >= 1):
        raise ParameterError(f"d must be an integer >= 1, got {d!r}")
    return _free_soliton_cached(d, r_max, n)


def free_soliton_mass(d: int) -> float:
    return solve_free_soliton(d)[1]


# ----------------------------------------------------------------------
# certificates
# ----------------------------------------------------------------------

def pohozaev_residuals(v: RadialField, p: ModelParams, omega: float):
    """Relative residuals of both stationarity identities.

    First: ||grad phi||^2 + omega M - G - ||phi||^{a+2} = 0  (equals K_omega).
    Second: (2-d)/2 ||grad phi||^2 - d omega/2 M + (d-sigma)/2 G
            + d/(alpha+2) ||phi||^{a+2} = 0.
    Each is normalized by its largest constituent term.
    """
    rep = functionals(v, p, omega)
    if rep.mass == 0.0:
        raise ParameterError("pohozaev residuals are undefined for the zero field")
    d, sigma, alpha = p.d, p.sigma, p.alpha
    t1 = (rep.kinetic, omega * rep.mass, -rep.potential_G, -rep.power_Lp)
    r1 = sum(t1) / max(abs(x) for x in t1)
    t2 = (
        0.5 * (2 - d) * rep.kinetic,
        -0.5 * d * omega * rep.mass,
        0.5 * (d - sigma) * rep.potential_G,
        d / (alpha + 2) * rep.power_Lp,
    )
    r2 = sum(t2) / max(abs(x) for x in t2)
    return float(r1), float(r2)
