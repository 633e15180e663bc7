"""Exception types shared across the package."""


class BridgestopError(Exception):
    """Base class for all package errors."""


class DomainError(BridgestopError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(BridgestopError):
    """A quadrature did not reach the requested tolerance.

    Carries the best value and error estimate reached before giving up.
    """

    def __init__(self, message: str, value: float, est_error: float):
        super().__init__(message)
        self.value = value
        self.est_error = est_error


class SolverError(BridgestopError):
    """A root solve failed; the message carries bracket diagnostics."""


class ConfigurationError(BridgestopError, ValueError):
    """A run configuration is inconsistent or too coarse to be meaningful."""
