"""Exception types raised across the package."""


class EEHSSKError(Exception):
    """Base class for all package errors."""


class RateInfeasibleError(EEHSSKError, ValueError):
    """Requested rate cannot be carried by the available symbols."""


class InvalidCodeError(EEHSSKError, ValueError):
    """An externally supplied code violates length or distance requirements."""


class DegenerateAlphabetError(EEHSSKError, ValueError):
    """Fewer symbols than an operation needs."""


class DomainError(EEHSSKError, ValueError):
    """Argument outside the domain where a formula is valid."""


class DimensionMismatchError(EEHSSKError, ValueError):
    pass


class UnknownSymbolError(EEHSSKError, KeyError):
    pass


class BudgetExceededError(EEHSSKError, RuntimeError):
    """Exhaustive search instance larger than the configured budget."""


class NonConvergenceError(EEHSSKError, RuntimeError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class MonotonicityError(EEHSSKError, RuntimeError):
    """A quantity assumed monotone in the tilt parameter was not."""
