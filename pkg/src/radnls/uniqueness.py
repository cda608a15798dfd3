"""Uniqueness conditions for the positive radial stationary solution.

The checker reduces the six classical conditions to exponent arithmetic
(integrability classes near the origin are decided entirely by exponents) and
to a single sign-change count for

    G(r) = (A r^2 + B r^(2-sigma) + C) r^power,

with closed-form coefficients in the model parameters.  Valid regime:
d >= 3, 0 < sigma < 1, 0 < alpha < 4/(d-2), omega > 0.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .params import ModelParams


@dataclass(frozen=True)
class SWCoefficients:
    A: float
    B: float
    C: float
    power: float


def _require_regime(p: ModelParams, omega: float):
    if p.d < 3:
        raise ParameterError(f"uniqueness checker requires d >= 3, got d = {p.d}")
    if not 0 < p.sigma < 1:
        raise ParameterError(f"uniqueness checker requires 0 < sigma < 1, got {p.sigma}")
    if not 0 < p.alpha < 4.0 / (p.d - 2):
        raise ParameterError(
            f"uniqueness checker requires 0 < alpha < 4/(d-2), got alpha = {p.alpha}"
        )
    if not omega > 0:
        raise ParameterError(f"uniqueness checker requires omega > 0, got {omega}")


def sw_coefficients(p: ModelParams, omega: float, c: float) -> SWCoefficients:
    """Closed-form coefficients of the sign-change function G(r)."""
    _require_regime(p, omega)
    d, sigma, alpha = p.d, p.sigma, p.alpha
    A = -omega * alpha * (d - 1) / (alpha + 4)
    B = c * ((2 * d - 2 - sigma) * alpha - 4 * sigma) / (2 * (alpha + 4))
    C = (
        (d - 1)
        * (4 - (d - 2) * alpha)
        * (2 * (d - 2) * alpha + 4 * (d - 3))
        / (alpha + 4) ** 3
    )
    power = ((2 * d - 3) * alpha + 4 * (d - 2)) / (alpha + 4) - 2.0
    return SWCoefficients(A=A, B=B, C=C, power=power)


def sw_G(r: float, coeffs: SWCoefficients, sigma: float) -> float:
    """G(r) = (A r^2 + B r^(2-sigma) + C) r^power."""
    if r <= 0:
        raise ParameterError(f"r must be positive, got {r}")
    return (coeffs.A * r**2 + coeffs.B * r ** (2 - sigma) + coeffs.C) * r**coeffs.power


@dataclass(frozen=True)
class ConditionReport:
    conditions: dict  # name -> (passed, note)
    r1: float | None
    sign_changes: int

    @property
    def all_pass(self) -> bool:
        return all(ok for ok, _ in self.conditions.values())


def check_conditions(p: ModelParams, omega: float, c: float) -> ConditionReport:
    """Evaluate conditions (I)-(VI); (V)-(VI) count sign changes of
    A r^2 + B r^(2-sigma) + C on a dense logarithmic grid, then bisect r1.

    Multiple sign changes produce an explicit violation verdict, never a
    silent pass.
    """
    _require_regime(p, omega)
    d, sigma, alpha = p.d, p.sigma, p.alpha
    co = sw_coefficients(p, omega, c)
    conds = {}
    # (I): g = c r^-sigma - omega is C^1 on (0, inf); h = 1 is C^3 and positive.
    conds["I"] = (True, "g in C^1(0,inf), h = 1 > 0")
    # (II): r^(1-d) * integral_0^r tau^(d-1)(|g| + h) -> 0 iff the worst term
    # r^(1-sigma) vanishes at 0, i.e. sigma < 1.
    conds["II"] = (sigma < 1, f"limit exponent 1 - sigma = {1 - sigma:g} > 0")
    # (III)(i): r^(d-1) g integrable near 0 iff d - 1 - sigma > -1 (sigma < d);
    # (iii)(ii): extra factor r^(2-d) leaves exponent 1 - sigma > -1 (sigma < 2).
    conds["III"] = (
        sigma < d and sigma < 2,
        f"integrability exponents d-1-sigma = {d - 1 - sigma:g}, 1-sigma = {1 - sigma:g}",
    )
    # (IV): a, b, c are pure powers with positive exponents for d >= 3;
    # a*g ~ r^(exp_a - sigma) needs exp_a > sigma.
    exp_a = 2 * (d - 1) * (alpha + 2) / (alpha + 4)
    exp_b = ((2 * d - 3) * alpha + 4 * (d - 2)) / (alpha + 4)
    exp_c = (2 * (d - 2) * alpha + 4 * (d - 3)) / (alpha + 4)
    iv_ok = exp_a > 0 and exp_b > 0 and exp_c >= 0 and exp_a > sigma
    conds["IV"] = (iv_ok, f"exponents a,b,c = {exp_a:g}, {exp_b:g}, {exp_c:g}")

    # (V)-(VI): exactly one positive sign change of P(r) = A r^2 + B r^(2-s) + C
    def P(r):
        return co.A * r**2 + co.B * r ** (2 - sigma) + co.C

    grid = np.logspace(-6, 6, 100_000)
    signs = np.sign(P(grid))
    flips = np.nonzero(np.diff(signs) != 0)[0]
    n_changes = len(flips)
    r1 = None
    if n_changes >= 1:
        lo, hi = grid[flips[0]], grid[flips[0] + 1]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if P(mid) > 0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-14 * hi:
                break
        r1 = 0.5 * (lo + hi)
    v_ok = n_changes == 1 and co.A < 0 and co.C > 0
    conds["V"] = (
        v_ok,
        f"A = {co.A:g} < 0, C = {co.C:g} > 0, sign changes = {n_changes}",
    )
    conds["VI"] = (v_ok, "G^- nonzero: G < 0 beyond r1" if v_ok else "no unique r1")
    return ConditionReport(conditions=conds, r1=r1, sign_changes=n_changes)
