"""
Service decorator for numeric service methods.
Runs the body with floating point traps enabled so that silent NaN/Inf
production surfaces as a library error instead of a corrupted tensor.
"""
from functools import wraps
from typing import Callable, Any

import numpy as np

from stsa.core.errors import NumericalError


def service_method(func: Callable) -> Callable:
    """
    Decorator for service methods.

    Invalid operations and divisions by zero raise ``FloatingPointError``
    inside the wrapped call, which is re-raised as ``NumericalError``.
    Underflow and overflow keep numpy's defaults.

    Usage:
        class MyService:
            @service_method
            def my_method(self, x):
                return np.log(x)
    """
    @wraps(func)
    def wrapper(*args, **kwargs) -> Any:
        try:
            with np.errstate(invalid="raise", divide="raise"):
                return func(*args, **kwargs)
        except FloatingPointError as e:
            raise NumericalError(f"{func.__qualname__}: {e}") from e

    return wrapper
