"""Every functional of the model evaluated on a discrete profile.

With beta = d*alpha/2 and M = ||v||_L2^2:

    E(v)   = 1/2 ||grad v||^2 - 1/2 G(v) - 1/(alpha+2) ||v||_{alpha+2}^{alpha+2}
    S_w(v) = E(v) + w/2 M
    K_w(v) = ||grad v||^2 - G(v) + w M - ||v||^{alpha+2}
    Q(v)   = ||grad v||^2 - sigma/2 G(v) - beta/(alpha+2) ||v||^{alpha+2}
    H_w(v) = ||grad v||^2 - G(v) + w M
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, ParameterError
from .field import RadialField
from .operators import radial_operator
from .params import ModelParams


@dataclass(frozen=True)
class FunctionalReport:
    """All functionals of one field at one frequency; assembled identities are exact."""

    mass: float
    kinetic: float
    potential_G: float
    power_Lp: float
    energy_E: float
    action_S: float
    nehari_K: float
    virial_Q: float
    quadratic_H: float
    omega: float
    sigma: float
    alpha: float
    beta: float
    coupling: float


def functionals(v: RadialField, p: ModelParams, omega: float) -> FunctionalReport:
    """Evaluate mass, kinetic, G, L^(alpha+2) power and the derived functionals."""
    if v.grid.d != p.d:
        raise GridMismatchError(f"grid dimension {v.grid.d} != params dimension {p.d}")
    op = radial_operator(v.grid, p.sigma)
    vals = v.values
    mass = op.mass(vals)
    kinetic = op.kinetic(vals)
    G = op.potential_G(vals, p.coupling)
    P = op.power_lp(vals, p.alpha)
    return assemble_report(mass, kinetic, G, P, p, omega)


def assemble_report(mass, kinetic, G, P, p: ModelParams, omega: float) -> FunctionalReport:
    alpha, beta, sigma = p.alpha, p.beta, p.sigma
    E = 0.5 * kinetic - 0.5 * G - P / (alpha + 2)
    return FunctionalReport(
        mass=mass,
        kinetic=kinetic,
        potential_G=G,
        power_Lp=P,
        energy_E=E,
        action_S=E + 0.5 * omega * mass,
        nehari_K=kinetic - G + omega * mass - P,
        virial_Q=kinetic - 0.5 * sigma * G - beta / (alpha + 2) * P,
        quadratic_H=kinetic - G + omega * mass,
        omega=omega,
        sigma=sigma,
        alpha=alpha,
        beta=beta,
        coupling=p.coupling,
    )


def energy(v: RadialField, p: ModelParams) -> float:
    return functionals(v, p, 0.0).energy_E


def euler_lagrange_residual(v: RadialField, p: ModelParams, omega: float) -> np.ndarray:
    """Pointwise residual of -Lap v - coupling |x|^(-sigma) v + omega v - |v|^alpha v.

    This is the exact weighted gradient of S_omega for the discrete functionals,
    scaled by the quadrature weights.
    """
    if v.grid.d != p.d:
        raise GridMismatchError(f"grid dimension {v.grid.d} != params dimension {p.d}")
    op = radial_operator(v.grid, p.sigma)
    vals = v.values
    return op.apply_linear(vals, omega, p.coupling) - np.abs(vals) ** p.alpha * vals


def hardy_ratio(v: RadialField, p: ModelParams) -> float:
    """G(v) / (kinetic^(sigma/2) mass^(1-sigma/2)); scale-invariant by construction."""
    rep = functionals(v, p, 0.0)
    if rep.mass == 0.0:
        raise ParameterError("hardy_ratio is undefined for the zero field")
    return rep.potential_G / (rep.kinetic ** (p.sigma / 2) * rep.mass ** (1 - p.sigma / 2))
