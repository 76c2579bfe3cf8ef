"""Exception hierarchy shared by all indicatrix modules."""


class IndicatrixError(Exception):
    """Base class for every error raised by the package."""


class ArgumentError(IndicatrixError, ValueError):
    pass


class OutOfDomainError(ArgumentError):
    """Argument outside the interval on which a function is defined."""


class OutOfRangeError(ArgumentError):
    """Value outside the range of a map that is being inverted, or beyond a grid limit."""


class InvariantViolation(IndicatrixError):
    pass


class SingularIntegrandError(IndicatrixError):
    pass


class DegenerateDomainError(ArgumentError):
    pass


class UnsupportedDomainError(IndicatrixError):
    """The requested engine or operation does not support this shape."""


class ContainmentError(ArgumentError):
    pass


class ResolutionError(ArgumentError):
    pass


class TopologyError(IndicatrixError):
    pass


class InsufficientDataError(IndicatrixError):
    pass


class ConstructionError(IndicatrixError):
    pass


class AccuracyError(IndicatrixError):
    """A numerical procedure failed to reach its requested accuracy."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class NoBracketError(IndicatrixError):
    pass


class ConfigError(IndicatrixError):
    pass


class CutoffError(AccuracyError):
    """Spectral cutoff too small: the discarded coefficient energy exceeds tolerance."""
