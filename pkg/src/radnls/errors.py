"""Exception types shared across the package."""


class RadnlsError(Exception):
    """Base class for all package errors."""


class ParameterError(RadnlsError, ValueError):
    """A parameter violates its admissible range."""


class GridMismatchError(RadnlsError, ValueError):
    """Two fields (or a field and parameters) live on incompatible grids."""


class FrequencyThresholdError(RadnlsError, ValueError):
    """Frequency is at or below the spectral threshold, H_omega is not coercive."""


class BracketingError(RadnlsError, RuntimeError):
    """Shooting could not bracket the decaying branch."""


class IntegrationFailure(RadnlsError, RuntimeError):
    """ODE integration failed; carries the radius where it stopped."""

    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class ConvergenceFailure(RadnlsError, RuntimeError):
    """An iterative solver did not meet its tolerance; carries diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ResolutionError(RadnlsError, RuntimeError):
    """A rescaled profile is too narrow for the grid it must live on."""


class SupercriticalMassError(RadnlsError, ValueError):
    """Mass-critical constrained minimization requested at or above the critical mass."""


class UnboundedBelowError(RadnlsError, ValueError):
    """Constrained minimization requested where the energy is unbounded from below."""


class ConfigError(RadnlsError, ValueError):
    """Invalid experiment configuration; names the offending key."""
