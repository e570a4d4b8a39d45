"""Exception and warning classes raised across the package."""


class ConstraintQuantError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ConstraintQuantError, ValueError):
    """Invalid truncation or experiment configuration."""


class ContractError(ConstraintQuantError, ValueError):
    """An operation was called outside its stated preconditions."""


class DomainError(ConstraintQuantError, ValueError):
    """A scalar parameter lies outside the admissible domain."""


class TruncationError(ConstraintQuantError):
    """The Fock truncation is too small for the requested accuracy.

    ``suggested_levels`` carries a per-mode level count that should work.
    """

    def __init__(self, message, suggested_levels=None):
        super().__init__(message)
        self.suggested_levels = suggested_levels


class IllConditionedIntervalError(ConstraintQuantError):
    """A spectral cut sits on top of an eigenvalue."""

    def __init__(self, message, suggested_delta=None):
        super().__init__(message)
        self.suggested_delta = suggested_delta


class ExtrapolationError(ConstraintQuantError):
    """A kernel family does not follow a clean power law in delta."""


class StatisticalError(ConstraintQuantError):
    """Monte Carlo estimate did not reach the requested standard error."""

    def __init__(self, message, stderr=None):
        super().__init__(message)
        self.stderr = stderr


class NumericWarning(RuntimeWarning):
    """Quadrature or refinement finished without meeting its target."""
