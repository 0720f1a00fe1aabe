"""Exception base shared by every tridiag-vqls module."""


class VqlsError(Exception):
    """Base exception for tridiag-vqls errors."""
    pass


class StateSizeError(VqlsError):
    """Raised when a qubit count or matrix dimension falls outside the supported range."""
    pass


class DimensionMismatchError(VqlsError):
    """Raised when two operands of a linear-algebra operation have incompatible sizes."""
    pass
