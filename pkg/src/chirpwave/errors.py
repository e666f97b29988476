"""Exception hierarchy shared by every chirpwave module."""


class ChirpwaveError(Exception):
    """Base class for all library errors."""


class ConfigurationError(ChirpwaveError, ValueError):
    """A parameter set violates a structural constraint (sizes, orders, delays)."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class DimensionError(ChirpwaveError, ValueError):
    """Array shapes do not agree."""


class PayloadError(ChirpwaveError, ValueError):
    """Bit payload has the wrong size for the requested modulation."""


class UndefinedMetricError(ChirpwaveError, ValueError):
    """A metric has no meaning for the given input (e.g. zero power)."""


class DetectionBudgetError(ChirpwaveError, ValueError):
    """Exhaustive detection would exceed the hypothesis budget."""


class NumericalError(ChirpwaveError, ArithmeticError):
    """A linear-algebra step failed (singular or ill-posed system)."""
