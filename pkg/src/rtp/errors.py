"""Exception types shared across the package."""


class RtpError(Exception):
    """Base class for all package errors."""


class ValidationError(RtpError, ValueError):
    """Structural problem with input data (shapes, axioms, malformed tables)."""


class LevelError(RtpError, ValueError):
    """A truncation level does not satisfy its containment requirements."""


class PreconditionError(RtpError, ValueError):
    """An operation's stated precondition fails on the given data."""


class NotAdjointableError(RtpError, ValueError):
    """A map on a Hilbert module is not A-linear / admits no adjoint."""


class IncompatibilityError(RtpError, ValueError):
    """No normalization makes the distinguished data compatible."""
