"""Model parameters for the focusing equation with attractive |x|^(-sigma) potential."""

from dataclasses import dataclass

from .errors import ParameterError


@dataclass(frozen=True)
class ModelParams:
    """Dimension, potential exponent, nonlinearity power and potential coupling.

    The scaling exponent beta = d*alpha/2 is always recomputed from (d, alpha),
    never stored, so it cannot drift out of sync.
    """

    d: int
    sigma: float
    alpha: float
    coupling: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.d, int) and self.d >= 1):
            raise ParameterError(f"d must be an integer >= 1, got {self.d!r}")
        if not 0.0 < self.sigma < min(2.0, float(self.d)):
            raise ParameterError(
                f"sigma must satisfy 0 < sigma < min(2, d) = {min(2, self.d)}, got {self.sigma}"
            )
        if not self.alpha > 0.0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if self.d >= 3 and self.alpha >= 4.0 / (self.d - 2):
            # energy-critical and supercritical powers are outside the admissible range
            raise ParameterError(
                f"alpha must be < 4/(d-2) = {4.0 / (self.d - 2):g} for d = {self.d}, got {self.alpha}"
            )
        if self.coupling < 0.0:
            raise ParameterError(f"coupling must be >= 0, got {self.coupling}")

    @property
    def beta(self) -> float:
        return self.d * self.alpha / 2.0

    @property
    def mass_critical(self) -> bool:
        return self.alpha == 4.0 / self.d

    @property
    def mass_subcritical(self) -> bool:
        return self.alpha < 4.0 / self.d

    @property
    def mass_supercritical(self) -> bool:
        return self.alpha > 4.0 / self.d
