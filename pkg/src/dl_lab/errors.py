"""Exception types shared across the package."""


class DLLabError(Exception):
    """Base class for all package errors."""


class ValidationError(DLLabError):
    """An object or document violates a structural invariant."""


class DimensionCapError(DLLabError):
    """The requested Hilbert-space dimension exceeds the configured cap."""


class ConvergenceError(DLLabError):
    """An iterative solver failed to reach the requested tolerance."""
