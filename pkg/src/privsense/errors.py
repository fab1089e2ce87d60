"""Exception types shared across the package."""


class PrivsenseError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimensionError(PrivsenseError, ValueError):
    """A dimension argument is zero, negative, or otherwise unusable."""


class DimensionMismatchError(PrivsenseError, ValueError):
    """Operands have incompatible shapes."""


class InvalidConfigError(PrivsenseError, ValueError):
    """A configuration value is outside its admissible range."""


class DegenerateKeyError(PrivsenseError, ValueError):
    """Key material is rank deficient or numerically unusable."""


class InvalidMessageError(PrivsenseError, ValueError):
    """Message bits are not a binary sequence of the expected length."""


class AuthorizationError(PrivsenseError, PermissionError):
    """Requested access level is not covered by the supplied keys."""


class DegenerateLabelError(PrivsenseError, ValueError):
    """Classification was asked for on single-class training data."""


class MissingMessageError(PrivsenseError, LookupError):
    """No embedded message is present in a reconstruction result."""


class InfeasibleToleranceError(PrivsenseError, RuntimeError):
    """The constrained solver could not reach the requested residual."""
