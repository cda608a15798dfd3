"""Cell-centered radial grids and surface-measure quadrature weights."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


def sphere_area(d: int) -> float:
    """|S^(d-1)|, with the d = 1 convention |S^0| = 2 (two half-lines)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Cell-centered radial grid: nodes r_j = (j + 1/2) h, j = 0..n-1.

    The first node sits at h/2 so the singular potential is never evaluated at
    the origin.  Quadrature is the midpoint rule against the surface measure,
    w_j = |S^(d-1)| r_j^(d-1) h; integrals over the ball of radius r_max of
    smooth radial functions are second-order accurate.
    """

    d: int
    n: int
    r_max: float
    h: float = field(init=False)
    r: np.ndarray = field(init=False, repr=False)
    w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        h = self.r_max / self.n
        r = (np.arange(self.n) + 0.5) * h
        w = sphere_area(self.d) * r ** (self.d - 1) * h
        r.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "w", w)

    def integrate(self, samples: np.ndarray) -> float:
        """Integral over the ball of radius r_max of a radial function."""
        return float(np.real(self.w @ samples))

    def ball_volume(self) -> float:
        return sphere_area(self.d) * self.r_max**self.d / self.d

    def same_as(self, other: "RadialGrid") -> bool:
        return (
            self is other
            or (self.d, self.n) == (other.d, other.n)
            and self.r_max == other.r_max
        )


def build_grid(d: int, r_max: float, n: int) -> RadialGrid:
    """Build a cell-centered radial grid; rejects degenerate sizes."""
    if not (isinstance(d, int) and d >= 1):
        raise ParameterError(f"d must be an integer >= 1, got {d!r}")
    if not (isinstance(n, int) and n >= 16):
        raise ParameterError(f"n must be an integer >= 16, got {n!r}")
    if not r_max > 0:
        raise ParameterError(f"r_max must be positive, got {r_max!r}")
    return RadialGrid(d=d, n=n, r_max=float(r_max))
