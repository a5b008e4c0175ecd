"""Exception and warning types shared across the package.

Each exception family maps onto one CLI exit code: configuration problems
exit with 2, bad input data with 3, numerical or properness failures with 4.
"""


class GammaRulError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigurationError(GammaRulError, ValueError):
    """Invalid sampler, scenario or command-line configuration."""

    exit_code = 2


class ValidationError(GammaRulError, ValueError):
    """Degradation data violate a modelling assumption (e.g. zero increment)."""

    exit_code = 3


class ShapeError(ValidationError):
    """Array lengths or grids do not line up."""


class UnsupportedGridError(ValidationError):
    """The heterogeneous model requires equally spaced measurements."""


class NumericalError(GammaRulError, ArithmeticError):
    exit_code = 4


class DomainError(NumericalError, ValueError):
    """Argument outside the domain of a mathematical function."""


class ProperError(NumericalError):
    """Hyperparameters give an improper (non-normalizable) density."""


class OptimizationError(NumericalError):
    """Mode search failed to bracket a stationary point."""


class ModelError(NumericalError):
    """A log-concavity assumption was violated during adaptive rejection sampling."""


class AlreadyFailedError(ValidationError):
    """The unit's degradation has already reached the threshold."""


class NotFailedError(ValidationError):
    """The path never reaches the threshold."""


class ResolutionWarning(RuntimeWarning):
    """Discrete grid puts almost all of its mass on very few points."""


class DegeneracyWarning(RuntimeWarning):
    """Importance weights collapsed onto a small fraction of the pool."""
