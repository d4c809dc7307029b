"""Exception hierarchy shared by all qmwf modules."""


class WavefrontError(ValueError):
    """Base class for every error raised by qmwf."""


class ConfigurationError(WavefrontError):
    """Invalid parameters, grids or configuration files."""

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class GeometryError(WavefrontError):
    """Balls, cones or probes that do not fit the sampled region."""


class ResolutionError(WavefrontError):
    """The grid does not resolve the requested feature (aliasing, under-sampling)."""


class BudgetError(WavefrontError):
    """A decay or leakage budget is not met."""


class FitError(WavefrontError):
    """Too few usable samples for a regression."""


class CharacteristicError(WavefrontError):
    """The principal symbol vanishes in the requested direction."""
