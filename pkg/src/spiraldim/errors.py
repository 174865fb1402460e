"""Exception hierarchy.

Two top-level families, matching the CLI exit-code contract: ValidationError
(bad inputs / violated preconditions, exit 1) and NumericalError (the inputs
were fine but the computation could not deliver, exit 2).
"""


class SpiraldimError(Exception):
    """Base class for all package errors."""


class ValidationError(SpiraldimError, ValueError):
    """A precondition or invariant was violated.  The message names it."""


class BudgetError(ValidationError):
    """Sample budget too small for the requested object."""

    def __init__(self, message, required_minimum=None):
        super().__init__(message)
        self.required_minimum = required_minimum


class MemoryBudgetError(ValidationError):
    """Raster would exceed the memory budget."""

    def __init__(self, message, suggested_raster_cell=None):
        super().__init__(message)
        self.suggested_raster_cell = suggested_raster_cell


class UnderSampledError(ValidationError):
    """Consecutive samples subtend an angular step >= pi at the origin."""


class InsufficientTurnsError(ValidationError):
    """Fewer section crossings / turns than the operation requires."""


class NumericalError(SpiraldimError, RuntimeError):
    """A numerical procedure failed or degraded past its contract."""


class StiffnessError(NumericalError):
    """Adaptive step-size control underflowed."""


class PartialCurveError(NumericalError):
    """Target radius unreachable within the sample budget.

    Carries the radius that was reached so callers can retry with a larger
    budget or accept the partial curve.
    """

    def __init__(self, message, reached_radius):
        super().__init__(message)
        self.reached_radius = reached_radius


class MixedSignError(NumericalError):
    """Return-map differences change sign (wavy interference at the section)."""
