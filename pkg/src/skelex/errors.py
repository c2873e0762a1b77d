"""Exception types shared across the package."""


class SkelexError(Exception):
    """Base class for all package errors."""


class GeometryError(SkelexError):
    """Degenerate or invalid geometric input (self-intersection, zero area, ...)."""


class StructuralError(SkelexError):
    """Inputs violate a structural contract (mismatched tessellations, bad shapes)."""


class OutOfDomainError(SkelexError):
    """A query point lies outside the bounded input domain."""


class UnsupportedDimensionError(SkelexError):
    """Input dimension other than 1 or 2."""


class InputError(SkelexError):
    """Malformed user-facing input (files, CLI values, non-finite numbers)."""
