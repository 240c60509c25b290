from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from kj_logger import get_logger

logger = get_logger(__name__)

SUBDIVISION_LIMIT = 200


def quadrature(f: Callable, abs_tol: float = 1e-12, breakpoints: Sequence[float] = (),
               weighted: bool = False, lower: float = 0.0, upper: float = 1.0) -> float:
    """
    Adaptive Gauss-Kronrod quadrature, integrated piece by piece between breakpoints.

    Args:
        f (Callable): Scalar or vectorized function.
        abs_tol (float): Absolute tolerance of the total.
        breakpoints (Sequence[float]): Points where f is not smooth, e.g. cell edges.
        weighted (bool): Multiply f by sin^2(pi x).

    Returns:
        float: The integral. A warning reports the achieved error if the subdivision cap is hit.
    """
    def integrand(x: float) -> float:
        value = float(np.asarray(f(x)))
        return value * np.sin(np.pi * x) ** 2 if weighted else value

    edges = sorted({lower, upper, *(p for p in breakpoints if lower < p < upper)})
    pieces = len(edges) - 1
    total, error = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        result = quad(integrand, a, b, epsabs=abs_tol / pieces, epsrel=0.0, limit=SUBDIVISION_LIMIT,
                      full_output=1)
        total += result[0]
        error += result[1]
        if len(result) > 3:
            logger.debug(f"quad on [{a:.6g}, {b:.6g}]: {result[3]}")
    if error > abs_tol:
        logger.warning(f"Quadrature reached error estimate {error:.3g} > requested {abs_tol:.3g}")
    return total
