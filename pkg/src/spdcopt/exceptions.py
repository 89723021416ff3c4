"""Exception hierarchy shared by all modules."""


class SpdcOptError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SpdcOptError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class BracketError(DomainError):
    """A root bracket does not contain a sign change."""


class SingularSigmaError(DomainError):
    """The phase-matching width estimate is singular (vanishing frequency derivative)."""


class ConsistencyError(SpdcOptError, ArithmeticError):
    """Internal cross-check failed, e.g. a closed form turned non-real."""


class ConvergenceError(SpdcOptError, RuntimeError):
    """An iterative search did not converge.

    The best iterate seen so far is kept on the exception.
    """

    def __init__(self, message, best_x=None, best_f=None):
        super().__init__(message)
        self.best_x = best_x
        self.best_f = best_f


class GridError(SpdcOptError, RuntimeError):
    """Numerical grid is too coarse or too narrow for the requested state."""


class ConfigError(SpdcOptError, ValueError):
    """Malformed scenario configuration."""


class VerificationError(SpdcOptError, RuntimeError):
    """A verification suite found a mismatch."""
