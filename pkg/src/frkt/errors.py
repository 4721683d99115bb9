"""Exception hierarchy shared by all frkt modules."""


class FrktError(Exception):
    """Base class for every error raised by frkt."""


class DomainError(FrktError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation at a pole."""


class RangeError(FrktError, ArithmeticError):
    """Argument outside the numerically supported or validated range."""


class ConvergenceError(FrktError, ArithmeticError):
    """Iterative method failed to converge.

    ``last`` and ``residual`` carry the final iterate and its residual.
    """

    def __init__(self, msg, last=None, residual=None):
        super().__init__(msg)
        self.last = last
        self.residual = residual


class SolverError(FrktError, ArithmeticError):
    def __init__(self, msg, location=None):
        super().__init__(msg)
        self.location = location


class SmoothnessError(DomainError):
    """Derivative requested beyond the smoothness available at a point."""


class SingularFactorError(DomainError):
    """An Euler factor vanishes, so its logarithm is undefined."""


class ResourceError(FrktError, MemoryError):
    pass


class ConfigError(FrktError, ValueError):
    def __init__(self, msg, field=None):
        super().__init__(msg)
        self.field = field
