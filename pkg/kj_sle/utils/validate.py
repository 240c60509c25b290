import math
from numbers import Integral, Real
from typing import Optional

from ..errors import InputError


def validate_probability(value: float, name: str = "delta") -> float:
    """
    Validate a failure probability.

    Parameters
    ----------
    value : float
        The value to validate.
    name : str
        Name used in the error message.

    Returns
    -------
    float
        The value as float.

    Raises
    ------
    InputError
        If the value is not a real number strictly between 0 and 1.
    """
    if isinstance(value, bool) or not isinstance(value, Real) or math.isnan(value):
        raise InputError(f"{name} must be a real number, got {value!r}.")
    if not 0.0 < value < 1.0:
        raise InputError(f"{name} must lie in (0, 1), got {value}.")
    return float(value)


def validate_positive(value: float, name: str, upper: Optional[float] = None) -> float:
    """
    Validate a positive real, optionally strictly below `upper`.

    Raises
    ------
    InputError
        If the value is not a finite positive real or not below `upper`.
    """
    if isinstance(value, bool) or not isinstance(value, Real) or not math.isfinite(value):
        raise InputError(f"{name} must be a finite real number, got {value!r}.")
    if value <= 0:
        raise InputError(f"{name} must be positive, got {value}.")
    if upper is not None and value >= upper:
        raise InputError(f"{name} must be smaller than {upper}, got {value}.")
    return float(value)


def validate_positive_int(value: int, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise InputError(f"{name} must be an integer, got {value!r}.")
    if value < minimum:
        raise InputError(f"{name} must be at least {minimum}, got {value}.")
    return int(value)


def is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


def validate_power_of_two(value: int, name: str = "N") -> int:
    """
    Validate that an integer is a power of two (1 included).

    Raises
    ------
    InputError
        If the value is not an integer power of two.
    """
    value = validate_positive_int(value, name)
    if not is_power_of_two(value):
        raise InputError(f"{name} must be a power of two, got {value}.")
    return value


def split_confidence(delta: float, parts: int) -> float:
    """
    Per-step failure probability d with (1 - d)^parts = 1 - delta, computed without cancellation.
    """
    delta = validate_probability(delta)
    parts = validate_positive_int(parts, "parts")
    return -math.expm1(math.log1p(-delta) / parts)
