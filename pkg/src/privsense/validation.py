"""Input validation helpers shared by the library and the estimator API."""

import numpy as np

from .errors import DimensionMismatchError, InvalidDimensionError


def as_float_matrix(a, name="matrix"):
    """Coerce to a finite, 2-D float64 array."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise InvalidDimensionError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.size == 0:
        raise InvalidDimensionError(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise InvalidDimensionError(f"{name} contains non-finite entries")
    return arr


def as_float_vector(a, name="vector"):
    """Coerce to a finite, 1-D float64 array."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1:
        raise InvalidDimensionError(f"{name} must be 1-D, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidDimensionError(f"{name} contains non-finite entries")
    return arr


def check_dim(value, expected, name="vector"):
    if value != expected:
        raise DimensionMismatchError(
            f"{name}: expected dimension {expected}, got {value}")
