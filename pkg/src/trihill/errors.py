"""Exception types shared across the package."""


class TrihillError(Exception):
    """Base class for package errors."""


class TripleCollisionError(TrihillError, ValueError):
    """Raised when an operation needs a nonzero configuration size."""


class CollinearError(TrihillError, ValueError):
    """Raised at collinear configurations, where the rotational reduction is singular."""


class SingularGeometryError(TrihillError, ValueError):
    """Raised when a kinetic-energy block cannot be inverted."""


class InternalConsistencyError(TrihillError, RuntimeError):
    """Raised when intermediate values violate an internal bound (beyond rounding)."""


class UnsupportedFamilyError(TrihillError, ValueError):
    """Raised when a closed-form critical-value family does not apply to a system."""
