"""Exception hierarchy shared across the package."""


class MollowError(Exception):
    """Base class for all package errors."""


class ValidationError(MollowError, ValueError):
    """Invalid input parameters or data."""


class NumericalError(MollowError, RuntimeError):
    """A numerical routine failed (quadrature, integrator, eigensolver)."""
