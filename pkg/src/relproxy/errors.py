"""Exception hierarchy shared by every module.

The CLI maps these onto process exit codes, so each class carries one.
"""


class RelProxyError(Exception):
    exit_code = 1


class UsageError(RelProxyError, ValueError):
    exit_code = 2


class DomainError(RelProxyError, ValueError):
    exit_code = 2


class RangeError(RelProxyError, OverflowError):
    """Result would overflow double precision."""

    exit_code = 2


class DivergenceError(RelProxyError, ArithmeticError):
    exit_code = 2


class AccuracyError(RelProxyError, ArithmeticError):
    """Quadrature did not reach its tolerance; ``best`` holds the last estimate."""

    exit_code = 4

    def __init__(self, message, best=None, abs_error=None):
        super().__init__(message)
        self.best = best
        self.abs_error = abs_error


class UnsupportedClosedFormError(RelProxyError):
    exit_code = 3


class CapabilityError(RelProxyError):
    exit_code = 3


class BoundaryLeakError(RelProxyError):
    exit_code = 4


class NotApplicableError(RelProxyError):
    exit_code = 4
