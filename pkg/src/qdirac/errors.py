"""Exception types raised by the library."""


class QDiracError(Exception):
    """Base class for all library errors."""


class ParameterError(QDiracError, ValueError):
    """A model or state parameter violates its domain."""


class DivergentSeries(ParameterError):
    """A q-series was requested outside its radius of convergence."""


class TruncationTooSmall(QDiracError):
    """The Fock truncation drops more probability than allowed.

    ``suggested_dim`` carries the smallest dimension that would satisfy
    the tolerance.
    """

    def __init__(self, message, suggested_dim=None):
        super().__init__(message)
        self.suggested_dim = suggested_dim


class UndefinedStatistic(QDiracError):
    """A statistic is undefined for the given state (e.g. 0/0)."""


class IncommensurateGrid(ParameterError):
    """Grid spacing does not divide the deformation shift exactly."""


class ConfigError(QDiracError):
    """Experiment configuration failed schema validation."""
