"""Exception types raised across the package."""


class CGLMPError(ValueError):
    """Base class for invalid inputs and violated invariants."""


class DimensionError(CGLMPError):
    """Raised when dimensions are out of range or do not match."""


class PerronViolation(CGLMPError):
    """Raised when a minimal eigenvector cannot be made entrywise nonnegative."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver exhausts its budget.

    The best-so-far approximation is kept on the exception so callers can
    inspect or salvage it.
    """

    def __init__(self, message, eigenvalue=None, eigenvector=None, residual=None, iterations=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.eigenvector = eigenvector
        self.residual = residual
        self.iterations = iterations
