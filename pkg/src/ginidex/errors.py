"""Exception hierarchy shared by every ginidex module."""


class GinidexError(Exception):
    """Base class for all library errors."""


class DomainError(GinidexError, ValueError):
    """An argument lies outside the domain of the function."""


class ConvergenceError(GinidexError, ArithmeticError):
    """An iterative method exhausted its iteration budget."""


class QuadratureError(ConvergenceError):
    """Adaptive integration could not meet the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NonFiniteIntegrandError(QuadratureError):
    pass


class InsufficientSampleError(GinidexError, ValueError):
    """Fewer observations than the subset size m."""


class SizeGuardError(GinidexError, ValueError):
    """Brute-force enumeration requested above the size guard."""


class DegenerateDataError(GinidexError, ValueError):
    """Data carry no dispersion (all equal) or violate positivity."""


class UndefinedShiftError(GinidexError, ValueError):
    pass
