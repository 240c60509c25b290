from itertools import permutations
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from kj_logger import get_logger

from ..errors import InputError

logger = get_logger(__name__)

MAX_SAT_VARIABLES = 24
MAX_TSP_CITIES = 9


def brute_sat(B: Callable[[int], int], n: int) -> Tuple[bool, Optional[int]]:
    """
    Scans all 2^n inputs.

    Returns:
        Tuple[bool, Optional[int]]: Whether B has a satisfying input and the smallest one.

    Raises:
        InputError: If n exceeds MAX_SAT_VARIABLES.
    """
    if not 0 <= n <= MAX_SAT_VARIABLES:
        raise InputError(f"brute_sat handles 0 <= n <= {MAX_SAT_VARIABLES}, got {n}")
    for j in range(2 ** n):
        if B(j):
            return True, j
    return False, None


def brute_count(B: Callable[[int], int], n: int) -> int:
    if not 0 <= n <= MAX_SAT_VARIABLES:
        raise InputError(f"brute_count handles 0 <= n <= {MAX_SAT_VARIABLES}, got {n}")
    return sum(B(j) for j in range(2 ** n))


def brute_min(values: Sequence[float]) -> Tuple[float, int]:
    """Minimum and its smallest index."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise InputError("brute_min needs at least one value")
    index = int(np.argmin(values))
    return float(values[index]), index


def brute_tsp(d: Sequence[Sequence[int]]) -> Tuple[int, Tuple[int, ...]]:
    """
    Shortest closed tour over all m! orderings of the cities 1..m.

    Orderings are visited lexicographically, so among shortest tours the
    lexicographically first one is returned.

    Raises:
        InputError: If m exceeds MAX_TSP_CITIES.
    """
    d = np.asarray(d, dtype=np.int64)
    m = d.shape[0]
    if not 2 <= m <= MAX_TSP_CITIES:
        raise InputError(f"brute_tsp handles 2 <= m <= {MAX_TSP_CITIES}, got {m}")
    best_length, best_tour = None, None
    for order in permutations(range(m)):
        length = int(sum(d[order[i], order[(i + 1) % m]] for i in range(m)))
        if best_length is None or length < best_length:
            best_length, best_tour = length, order
    logger.debug(f"brute_tsp: {m} cities, optimum {best_length}")
    return best_length, tuple(city + 1 for city in best_tour)
