"""Friable-integer asymptotics for f(n) = z^omega(n), with an exact sieve oracle."""
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    FrktError,
    PoleError,
    RangeError,
    ResourceError,
    SingularFactorError,
    SmoothnessError,
    SolverError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "FrktError",
    "PoleError",
    "RangeError",
    "ResourceError",
    "SingularFactorError",
    "SmoothnessError",
    "SolverError",
]
