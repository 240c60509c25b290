from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from kj_logger import get_logger

from ..classes.potential import Potential, SmoothIntegrand
from ..reductions.sat import CnfFormula
from .quadrature import quadrature

logger = get_logger(__name__)


def high_resolution_lambda(q: Potential, k: int) -> float:
    """
    Smallest eigenvalue of the size-k finite-difference matrix via LAPACK.

    Independent of the Sturm and extrapolation code paths.
    """
    scale = float((k + 1) ** 2)
    grid = np.arange(1, k + 1) / (k + 1)
    diag = 2 * scale + q.eval(grid)
    offdiag = np.full(k - 1, -scale)
    values = eigh_tridiagonal(diag, offdiag, eigvals_only=True, select="i", select_range=(0, 0))
    return float(values[0])


def weighted_integral(f, abs_tol: float = 1e-12, breakpoints=()) -> float:
    """I(f) = int_0^1 f(x) sin^2(pi x) dx."""
    return quadrature(f, abs_tol=abs_tol, breakpoints=breakpoints, weighted=True)


def random_smooth_integrand(rng: np.random.Generator, bound_M: float = 1.0, modes: int = 3,
                            max_frequency: float = 1.5) -> SmoothIntegrand:
    """
    Random trigonometric sum whose value and first two derivatives stay below bound_M.

    Amplitudes are normalized by the sum of |a| (2 pi f)^p over the modes for the worst p.
    """
    amplitudes = rng.uniform(-1.0, 1.0, modes)
    frequencies = rng.uniform(0.1, max_frequency, modes)
    phases = rng.uniform(0.0, 2 * np.pi, modes)
    omegas = 2 * np.pi * frequencies
    worst = max(float(np.sum(np.abs(amplitudes) * omegas ** p)) for p in range(3))
    amplitudes = amplitudes * bound_M / worst

    def func(x):
        x = np.asarray(x, dtype=float)
        return np.sum(amplitudes[:, None] * np.sin(np.outer(omegas, x.ravel()) + phases[:, None]),
                      axis=0).reshape(x.shape)

    return SmoothIntegrand(func, bound_M, label="random_trig")


def random_cnf(rng: np.random.Generator, n: int, clauses: Optional[int] = None, width: int = 3) -> CnfFormula:
    """Random width-k CNF on n variables, distinct variables within a clause; about 4.26 n clauses by default."""
    clauses = clauses if clauses is not None else max(1, round(4.26 * n))
    width = min(width, n)
    rows: List[Tuple[int, ...]] = []
    for _ in range(clauses):
        variables = rng.choice(np.arange(1, n + 1), size=width, replace=False)
        signs = rng.choice([-1, 1], size=width)
        rows.append(tuple(int(v * s) for v, s in zip(variables, signs)))
    return CnfFormula(n, tuple(rows))


def random_distance_matrix(rng: np.random.Generator, m: int, d_max: int = 9) -> np.ndarray:
    """Asymmetric integer distances in [1, d_max] with a zero diagonal."""
    d = rng.integers(1, d_max + 1, size=(m, m))
    np.fill_diagonal(d, 0)
    return d
