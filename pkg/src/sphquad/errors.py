"""Exception hierarchy shared by the library and the command line."""


class SphquadError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(SphquadError, ValueError):
    pass


class DomainError(SphquadError, ValueError):
    """An argument lies outside the mathematical domain of the function."""


class ResourceLimitError(SphquadError):
    """The requested size exceeds a configured memory or size guard."""


class ConstructionError(SphquadError, RuntimeError):
    """A quadrature construction broke down.

    ``residual`` carries the last relative residual of the iterative solve
    (or the breakdown quantity for the recurrence), when one exists.
    """

    def __init__(self, message, residual=None, history=None):
        super().__init__(message)
        self.residual = residual
        self.history = history


class ConvergenceError(SphquadError, RuntimeError):
    """An eigenvalue iteration did not reach the requested accuracy."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history or [])


class DataFormatError(SphquadError, ValueError):
    """An input file is malformed.  ``lines`` lists offending 1-based line
    numbers."""

    def __init__(self, message, lines=None):
        super().__init__(message)
        self.lines = list(lines or [])
