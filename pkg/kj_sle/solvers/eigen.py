"""
Classical eigensolvers for M_q.

Two families live here. Sturm-sequence multisection with inverse iteration
works on the matrix itself. The centred solver computes
lambda_k(q) - lambda_k(1/2) in the discrete sine basis, where M_{1/2} is
diagonal, and keeps full relative precision for potentials that differ from
1/2 by a tiny amount. That is the regime every reduction drives the
eigenvalue problem into.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.fft import dst
from scipy.linalg import LinAlgError, solve_banded

from kj_logger import get_logger

from ..classes.potential import Potential
from ..classes.scaling_fit import ScalingFit
from ..classes.tridiagonal_system import TridiagonalSystem
from ..core_config import SleConfig, get_config
from ..errors import CapacityError, ConvergenceError, InputError
from ..utils.runtime_manager import dec_runtime

logger = get_logger(__name__)

LAMBDA_HALF = math.pi ** 2 + 0.5  # lambda(q) for q = 1/2
MAX_PASSES = 200
INVERSE_ITERATIONS = 10
RESIDUAL_TOL = 1e-10  # relative to ||M_q||_inf


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray  # unit 2-norm
    index: int  # 0 = smallest


@dataclass(frozen=True)
class CentredShift:
    k: int
    delta: float  # lambda_k(q) - lambda_k(1/2)
    overlap_weight: float  # squared overlap of the ground vector with the discrete sine vector
    iterations: int


@dataclass(frozen=True)
class ReferenceExcess:
    excess: float  # extrapolated lambda(q) - pi^2 - 1/2
    achieved: float  # difference of the last two extrapolants
    k: int  # finest grid used
    shift_k: float  # centred shift on that grid
    overlap_weight: float
    converged: bool

    def shift_at(self, k: int) -> float:
        """Centred shift on grid k from the model delta_k = excess + a (k+1)^-2."""
        a = (self.shift_k - self.excess) * (self.k + 1) ** 2
        return self.excess + a / (k + 1) ** 2


def free_smallest_eigenvalue(k: int) -> float:
    """Smallest eigenvalue of M_0: 4(k+1)^2 sin^2(pi / (2(k+1)))."""
    return 4.0 * (k + 1) ** 2 * math.sin(math.pi / (2 * (k + 1))) ** 2


def free_eigenvalues(k: int, count: int) -> np.ndarray:
    j = np.arange(1, count + 1, dtype=float)
    return 4.0 * (k + 1) ** 2 * np.sin(j * np.pi / (2 * (k + 1))) ** 2


def sine_vector(k: int, mode: int = 1) -> np.ndarray:
    """Unit discrete sine vector sin(mode * pi * i / (k+1)), i = 1..k."""
    i = np.arange(1, k + 1, dtype=float)
    v = np.sin(mode * np.pi * i / (k + 1))
    return v / np.linalg.norm(v)


def _negcount(a: np.ndarray, b2: float, shifts: np.ndarray) -> np.ndarray:
    """Number of eigenvalues below each shift, by the LDL^T pivot signs."""
    shifts = np.asarray(shifts, dtype=float)
    pivmin = np.finfo(float).tiny * max(b2, 1.0)
    d = a[0] - shifts
    d[np.abs(d) < pivmin] = -pivmin
    count = (d < 0).astype(np.int64)
    for ai in a[1:]:
        d = (ai - shifts) - b2 / d
        d[np.abs(d) < pivmin] = -pivmin
        count += d < 0
    return count


def sturm_count(T: TridiagonalSystem, shifts) -> np.ndarray:
    """
    Sturm-sequence count of the eigenvalues of T strictly below each shift.

    Args:
        T (TridiagonalSystem): The matrix.
        shifts: One shift or an array of shifts.

    Returns:
        np.ndarray: Counts with the shape of `shifts`.
    """
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    return _negcount(T.diag, T.scale ** 2, shifts.ravel()).reshape(shifts.shape)


def gershgorin_interval(T: TridiagonalSystem):
    return T.gershgorin_interval()


def _centred_diagonal(T: TridiagonalSystem):
    """Diagonal with min(q) removed, so constant potentials give identical arithmetic."""
    origin = float(np.min(T.potential_values))
    return 2 * T.scale + (T.potential_values - origin), origin


def _multisect(a: np.ndarray, b2: float, indices: np.ndarray, lo: np.ndarray, hi: np.ndarray,
               tol: float, points: int) -> np.ndarray:
    fractions = np.arange(1, points + 1) / (points + 1)
    for passes in range(MAX_PASSES):
        width = hi - lo
        if np.all(width <= 2 * tol):
            break
        shifts = lo[:, None] + width[:, None] * fractions[None, :]
        counts = _negcount(a, b2, shifts.ravel()).reshape(shifts.shape)
        below = counts <= indices[:, None]
        lo = np.maximum(lo, np.where(below, shifts, -np.inf).max(axis=1))
        hi = np.minimum(hi, np.where(below, np.inf, shifts).min(axis=1))
        if np.all(hi - lo >= width):
            logger.debug(f"Multisection stalled at width {np.max(hi - lo):.3g} (floating-point resolution)")
            break
    else:
        raise ConvergenceError(f"Sturm multisection did not reach tol={tol:g} in {MAX_PASSES} passes")
    logger.debug(f"Multisection of {len(indices)} eigenvalues finished after {passes} passes")
    return 0.5 * (lo + hi)


def _eigenvalues_centred(T: TridiagonalSystem, count: int, tol: float):
    a, origin = _centred_diagonal(T)
    spread = float(np.max(a) - np.min(a))
    margin = 64 * np.finfo(float).eps * T.norm_inf() + tol
    # Weyl: lambda_i(L + D) lies within [mu_i + min D, mu_i + max D]
    mu = free_eigenvalues(T.k, count)
    lo = mu - margin
    hi = mu + spread + margin
    points = max(2, 256 // count)
    values = _multisect(a, T.scale ** 2, np.arange(count), lo, hi, tol, points)
    return values, a, origin


@dec_runtime
def smallest_eigenvalue_classical(T: TridiagonalSystem, tol: float = 1e-12) -> float:
    """
    Smallest eigenvalue of M_q by Sturm-sequence multisection.

    Args:
        T (TridiagonalSystem): The matrix.
        tol (float): Absolute tolerance.

    Returns:
        float: lambda_min(T) within tol, up to the floating-point resolution of T.

    Raises:
        InputError: If tol is not positive.
        ConvergenceError: If the pass cap is reached.
    """
    if not tol > 0:
        raise InputError(f"tol must be positive, got {tol}")
    values, _, origin = _eigenvalues_centred(T, 1, tol)
    return float(values[0]) + origin


def _inverse_iteration(T: TridiagonalSystem, a: np.ndarray, value: float, index: int,
                       previous: List[np.ndarray]) -> np.ndarray:
    k = T.k
    bands = np.zeros((3, k))
    bands[0, 1:] = T.offdiag
    bands[2, :-1] = T.offdiag
    x = sine_vector(k, index + 1)
    basis = np.array(previous).T if previous else None
    limit = RESIDUAL_TOL * T.norm_inf()
    shift = value
    for iteration in range(INVERSE_ITERATIONS):
        bands[1] = a - shift
        try:
            y = solve_banded((1, 1), bands, x, check_finite=False)
        except LinAlgError:
            shift = value - 8 * np.finfo(float).eps * T.norm_inf()
            continue
        if basis is not None:
            y -= basis @ (basis.T @ y)
        x = y / np.linalg.norm(y)
        residual = a * x - value * x
        residual[1:] += T.offdiag * x[:-1]
        residual[:-1] += T.offdiag * x[1:]
        if np.max(np.abs(residual)) <= limit:
            break
    else:
        raise ConvergenceError(f"Inverse iteration for eigenpair {index} did not converge")
    pivot = np.argmax(np.abs(x))
    return x if x[pivot] > 0 else -x


@dec_runtime
def leading_eigenpairs(T: TridiagonalSystem, count: int, tol: float = 1e-12) -> List[EigenPair]:
    """
    The `count` smallest eigenpairs of M_q in increasing order.

    Eigenvalues come from Sturm multisection, eigenvectors from inverse iteration
    seeded with the matching discrete sine mode and re-orthogonalized against the
    vectors already found.

    Raises:
        InputError: If count is outside [1, k].
        ConvergenceError: If a vector misses the residual bound within the iteration cap.
    """
    if int(count) != count or not 1 <= count <= T.k:
        raise InputError(f"count must lie in [1, {T.k}], got {count}")
    if not tol > 0:
        raise InputError(f"tol must be positive, got {tol}")
    values, a, origin = _eigenvalues_centred(T, int(count), tol)
    pairs, vectors = [], []
    for index, value in enumerate(values):
        vector = _inverse_iteration(T, a, float(value), index, vectors)
        vectors.append(vector)
        pairs.append(EigenPair(float(value) + origin, vector, index))
    return pairs


def centred_shift(q: Potential, k: int, max_iterations: int = 100) -> CentredShift:
    """
    lambda_k(q) - lambda_k(1/2) by a fixed-point iteration in the discrete sine basis.

    With v = s_1 + w, w orthogonal to s_1, the eigen-equation splits into
    delta = <s_1, e v> and w_j = -<s_j, e v> / (g_j - delta), where e = q - 1/2 on
    the grid and g_j is the gap of the constant-potential spectrum. The map
    contracts because |e| <= 1/2 is far below the smallest gap (about 3 pi^2).

    Raises:
        ConvergenceError: If the iteration cap is reached.
    """
    if int(k) != k or k < 1:
        raise InputError(f"k must be a positive integer, got {k}")
    k = int(k)
    grid = np.arange(1, k + 1, dtype=float) / (k + 1)
    e = q.deviation(grid)
    theta = math.pi / (2 * (k + 1))
    j = np.arange(1, k, dtype=float)
    gaps = 4.0 * (k + 1) ** 2 * np.sin((j + 2) * theta) * np.sin(j * theta)

    coefficients = np.zeros(k)
    coefficients[0] = 1.0
    delta = None
    for iteration in range(1, max_iterations + 1):
        v = dst(coefficients, type=1, norm="ortho")
        r_hat = dst(e * v, type=1, norm="ortho")
        new_delta = float(r_hat[0])
        coefficients[1:] = -r_hat[1:] / (gaps - new_delta)
        if delta is not None and abs(new_delta - delta) <= 1e-14 * abs(new_delta):
            delta = new_delta
            break
        delta = new_delta
    else:
        raise ConvergenceError(f"Centred shift on grid k={k} did not converge in {max_iterations} iterations")
    weight = 1.0 / float(np.dot(coefficients, coefficients))
    return CentredShift(k=k, delta=delta, overlap_weight=weight, iterations=iteration)


def resolution_start(q: Potential, k_start: int) -> int:
    """First grid of the step-doubling sequence: at least 16 points per feature of q."""
    k = k_start
    if q.feature_width:
        needed = math.ceil(16.0 / q.feature_width)
        k = max(k, 2 ** max(needed - 1, 1).bit_length() - 1)
    return k


@dec_runtime
def reference_excess(q: Potential, tol: float, config: Optional[SleConfig] = None,
                     k_max: Optional[int] = None) -> ReferenceExcess:
    """
    lambda(q) - pi^2 - 1/2 by step doubling k -> 2k+1 of the centred shift with
    Richardson extrapolation (4 delta_{2k+1} - delta_k) / 3.

    Stops when two successive extrapolants agree within tol. When the grid cap is
    reached first, the result carries converged=False and the achieved difference.
    """
    config = get_config(config)
    k_max = config.classical_k_max if k_max is None else k_max
    k = resolution_start(q, config.classical_k_start)
    if 2 * k + 1 > k_max:
        raise CapacityError(f"Grid cap k_max={k_max} cannot resolve {q.label} (needs k >= {2 * k + 1})")
    coarse = centred_shift(q, k)
    k = 2 * k + 1
    fine = centred_shift(q, k)
    extrapolated = (4 * fine.delta - coarse.delta) / 3
    achieved = math.inf
    while 2 * k + 1 <= k_max:
        k = 2 * k + 1
        coarse, fine = fine, centred_shift(q, k)
        previous, extrapolated = extrapolated, (4 * fine.delta - coarse.delta) / 3
        achieved = abs(extrapolated - previous)
        logger.debug(f"Step doubling k={k}: excess={extrapolated:.17g}, change={achieved:.3g}")
        if achieved <= tol:
            return ReferenceExcess(extrapolated, achieved, k, fine.delta, fine.overlap_weight, True)
    logger.warning(f"Step doubling for {q.label} stopped at k={k} with achieved accuracy {achieved:.3g} > {tol:.3g}")
    return ReferenceExcess(extrapolated, achieved, k, fine.delta, fine.overlap_weight, False)


def reference_lambda(q: Potential, tol: float = 1e-10, config: Optional[SleConfig] = None) -> float:
    """
    Continuous lambda(q) from step-doubled, Richardson-extrapolated grid solves.

    Args:
        q (Potential): The potential.
        tol (float): Target accuracy, at least 1e-10.

    Returns:
        float: lambda(q); a warning reports the achieved accuracy if the grid cap stops the doubling.
    """
    if not tol >= 1e-10:
        raise InputError(f"tol must be at least 1e-10, got {tol}")
    return LAMBDA_HALF + reference_excess(q, tol, config).excess


def fit_convergence_order(ks: Sequence[int], errors: Sequence[float]) -> ScalingFit:
    """Log-log fit of |error| against k+1; a second-order scheme gives slope -2."""
    size = pd.Series([float(k + 1) for k in ks])
    err = pd.Series([abs(e) for e in errors])
    return ScalingFit.calc(np.log(size), np.log(err))
