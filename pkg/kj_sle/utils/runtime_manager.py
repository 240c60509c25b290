import functools
import time

from kj_logger import get_logger

logger = get_logger(__name__)

ENABLE_TIMING = True


def dec_runtime(func):
    """Logs the wall time of each call at debug level."""
    if not ENABLE_TIMING:
        return func

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            run_time = time.perf_counter() - start_time
            logger.debug(f" ----------------- [Runtime]{run_time:.4f} secs, {func.__qualname__}[Runtime] ----------------- ")

    return wrapper
