import typing as t

import numpy as np
import numpy.typing as npt

# CONSIDER: pydantic covers the configuration objects. These could move to
# pydantic validators too if they ever leave the per-step loops.


class ValidationError(ValueError):
    """Raised when a validation fails."""

    pass


class DimensionMismatch(ValidationError):
    """Raised when an array does not have the dimension a contract requires."""

    def __init__(self, expected: int | tuple[int, ...], got: int | tuple[int, ...]):
        super().__init__(f"Expected dimension {expected}, got {got}")
        self.expected = expected
        self.got = got


class DomainError(ValidationError):
    """Raised when a parameter lies outside the domain an operation accepts."""

    pass


#
# Scalar validations
#


def is_positive(value: t.Any) -> bool:
    """Return True if the value is a finite number greater than zero."""
    try:
        return bool(np.isfinite(value) and value > 0)
    except TypeError:
        return False


def validate_positive(value: t.Any, name: str = "value") -> float:
    """Return the value as a float if it is finite and > 0, otherwise raise."""
    if is_positive(value):
        return float(value)
    raise ValidationError(f"Expected {name} > 0, got {value}")


def validate_finite(value: t.Any, name: str = "value") -> float:
    """Return the value as a float if it is a finite real number."""
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"Expected a real {name}, got {value}") from None
    if not np.isfinite(number):
        raise ValidationError(f"Expected a finite {name}, got {value}")
    return number


#
# Array validations
#


def is_finite_vector(value: t.Any) -> bool:
    """Return True if the value is a one-dimensional array of finite reals."""
    try:
        array = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        return False
    return array.ndim == 1 and bool(np.all(np.isfinite(array)))


def validate_finite_vector(
    value: t.Any, dimension: int | None = None
) -> npt.NDArray[np.float64]:
    """
    Return `value` as a float64 vector, ensuring every entry is finite and,
    when `dimension` is given, that it has exactly that many entries.
    """
    try:
        array = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise ValidationError(f"Expected a real vector, got {value!r}") from None
    if array.ndim != 1:
        raise ValidationError(f"Expected a vector, got shape {array.shape}")
    if dimension is not None and array.shape[0] != dimension:
        raise DimensionMismatch(dimension, array.shape[0])
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"Expected finite entries, got {array}")
    return array


def validate_dimension(
    array: npt.NDArray[np.float64], dimension: int
) -> npt.NDArray[np.float64]:
    """Ensure a vector has `dimension` entries."""
    if array.ndim != 1 or array.shape[0] != dimension:
        raise DimensionMismatch(dimension, array.shape[0] if array.ndim else 0)
    return array


def validate_matrix(value: t.Any) -> npt.NDArray[np.float64]:
    """Return `value` as a finite two-dimensional float64 array."""
    try:
        array = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise ValidationError(f"Expected a real matrix, got {value!r}") from None
    if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
        raise ValidationError(f"Expected a non-empty matrix, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValidationError("Expected finite matrix entries")
    return array


def validate_square(value: t.Any) -> npt.NDArray[np.float64]:
    """Return `value` as a finite square matrix, otherwise raise."""
    array = validate_matrix(value)
    if array.shape[0] != array.shape[1]:
        raise DimensionMismatch((array.shape[0], array.shape[0]), array.shape)
    return array


def validate_same_shape(
    a: npt.NDArray[np.float64], b: npt.NDArray[np.float64]
) -> tuple[int, ...]:
    """Ensure two arrays share a shape and return it."""
    if a.shape != b.shape:
        raise DimensionMismatch(a.shape, b.shape)
    return a.shape

