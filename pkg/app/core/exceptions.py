"""
Custom exceptions for the tower toolkit.

Every error carries the process exit code the CLI reports for it.
"""
from typing import Optional


class TowerError(Exception):
    """Base exception for all tower toolkit errors."""

    def __init__(self, message: str, exit_code: int = 1, details: Optional[dict] = None):
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


class ConfigurationError(TowerError):
    """Configuration or environment setup error."""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message, exit_code=2, details=details)


class ConfigInvalid(TowerError):
    """Run configuration rejected before any computation started."""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message, exit_code=2, details=details)


class ComputationFailed(TowerError):
    """A numerical step failed; partial results may still be reported."""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message, exit_code=1, details=details)


class NonIntegrable(ComputationFailed):
    """Declared decay is too slow for the requested unbounded domain."""


class ToleranceNotReached(ComputationFailed):
    """Adaptive refinement budget exhausted before the tolerance was met."""

    def __init__(self, message: str, best_estimate=None, details: Optional[dict] = None):
        self.best_estimate = best_estimate
        super().__init__(message, details=details)


class UnsupportedDegree(ComputationFailed):
    """Moment of even total degree above four requested."""


class SymmetryViolation(ComputationFailed):
    """Curvature data does not carry the algebraic Riemann symmetries."""


class DimensionTooLow(ComputationFailed):
    """Dimension below the range where the quantity is defined."""


class NonMonotoneScales(ComputationFailed):
    """Concentration scales are not strictly decreasing."""


class IndexOutOfRange(ComputationFailed):
    """Bubble, level or shell index outside the tower."""


class NonPositiveValue(ComputationFailed):
    """Log-log fit received a value that is not strictly positive."""


class TooFewPoints(ComputationFailed):
    """Series too short for a log-log fit."""


class DegenerateWeyl(ComputationFailed):
    """Reduced energy has no interior maximum because |Weyl|^2 <= 0."""


class StepTooSmall(ComputationFailed):
    """Finite-difference step is dominated by rounding error."""


class SingularMetric(ComputationFailed):
    """Metric is not positive definite at the requested point."""


class OutOfDomain(ComputationFailed):
    """Chart coordinates outside the chart's coordinate box."""


class FixedPointViolation(ComputationFailed):
    """Candidate isometry does not fix the declared point."""
