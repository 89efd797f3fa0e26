"""
Timing decorator for heavy service operations.

Keeps services free of stopwatch code: the decorated call is timed with
``time.perf_counter`` and the duration is logged under a namespace.
"""
import time
import logging
from functools import wraps
from typing import Callable, Any

logger = logging.getLogger(__name__)


def timed(namespace: str, log_performance: bool = True):
    """
    Decorator to log how long a service operation took.

    Args:
        namespace: Label for the log line (e.g., 'block', 'train')
        log_performance: Whether to emit the INFO line at all

    Example:
        @timed("sweep")
        def sweep_subspace_sizes(self, sizes, scene):
            ...
    """
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            start = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                elapsed = (time.perf_counter() - start) * 1000
                if log_performance:
                    logger.info(f"[{namespace}] {func.__name__} took {elapsed:.2f}ms")
                else:
                    logger.debug(f"[{namespace}] {func.__name__} took {elapsed:.2f}ms")

        return wrapper
    return decorator
