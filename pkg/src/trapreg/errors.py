"""Exception types raised across the package."""


class TrapregError(Exception):
    """Base class for all package errors."""


class DomainError(TrapregError, ValueError):
    """A quantity is not defined for the requested model or argument."""


class NumericalError(TrapregError, ArithmeticError):
    """A numerical routine failed (e.g. Cholesky even after jitter)."""


class InvalidDensity(TrapregError, ValueError):
    """A design density violates positivity, boundedness or normalization."""


class EmptyWindow(TrapregError, ValueError):
    """Fewer than two design points fall inside the kernel window."""


class ZeroMass(TrapregError, ValueError):
    """Boundary renormalization found no weight mass to rescale."""


class DegenerateCurvature(TrapregError, ValueError):
    """The regression function has zero integrated squared curvature."""


class InsufficientReplicates(TrapregError, ValueError):
    """An estimate needs more replicated experimental units."""


class ConfigError(TrapregError, ValueError):
    """An experiment configuration is malformed or out of range."""
