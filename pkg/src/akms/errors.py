"""Exception types shared across the package."""


class AkmsError(Exception):
    """Base class for all errors raised by :mod:`akms`."""


class DomainError(AkmsError, ValueError):
    """An argument lies outside the domain of the requested function."""


class ConvergenceError(AkmsError, ArithmeticError):
    """A series or quadrature did not reach its tolerance.

    The best available estimate is kept on the exception so callers can
    decide whether to fall back to another method or use it anyway.
    """

    def __init__(self, message, partial_value=float("nan"), abs_err_estimate=float("inf")):
        super().__init__(message)
        self.partial_value = partial_value
        self.abs_err_estimate = abs_err_estimate


class ConsistencyError(AkmsError, ArithmeticError):
    """Two routes that must agree (e.g. a CDF and its [0, 1] range) do not."""
