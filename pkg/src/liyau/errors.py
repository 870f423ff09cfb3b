"""Exception hierarchy shared by every module."""


class LiYauError(Exception):
    """Base class for all package errors."""


class DomainError(LiYauError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ConfigurationError(LiYauError, ValueError):
    """Unknown family, estimate id, or malformed configuration."""


class PreconditionError(DomainError):
    """A parameter curve or weight fails its admissibility conditions."""


class NumericalError(LiYauError, ArithmeticError):
    """A numerical procedure failed (non-convergence, loss of positivity)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
