from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from kj_logger import get_logger

from ..errors import InputError

logger = get_logger(__name__)

ArrayFunc = Callable[[np.ndarray], np.ndarray]


def _vectorized(func: ArrayFunc, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.broadcast_to(np.asarray(func(x), dtype=float), x.shape).copy()


class SmoothIntegrand:
    """
    A real function on [0, 1] with a declared bound M on its sup norm and on the
    sup norms of its first two derivatives.

    `feature_width` is the length scale of the narrowest structure of f (for a
    bump integrand, the cell width). Grid-based solvers start fine enough to
    resolve it.
    """

    def __init__(self, func: ArrayFunc, bound_M: float, label: str = "f",
                 feature_width: Optional[float] = None, breakpoints: Sequence[float] = ()):
        if not bound_M > 0:
            raise InputError(f"bound_M must be positive, got {bound_M}")
        self._func = func
        self.bound_M = float(bound_M)
        self.label = label
        self.feature_width = feature_width
        self.breakpoints = tuple(breakpoints)

    def __repr__(self) -> str:
        return f"<SmoothIntegrand {self.label} M={self.bound_M:g}>"

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x) -> np.ndarray:
        return _vectorized(self._func, x)

    def scaled(self, factor: float) -> "SmoothIntegrand":
        """Returns factor * f with the bound scaled accordingly."""
        if factor == 0:
            raise InputError("Scaling factor must be nonzero")
        return SmoothIntegrand(lambda x: factor * self._func(x), abs(factor) * self.bound_M,
                               label=f"{factor:g}*{self.label}", feature_width=self.feature_width,
                               breakpoints=self.breakpoints)

    def spot_check(self, grid_points: int = 4096) -> List[str]:
        """
        Samples |f| on a uniform grid and reports values exceeding bound_M.

        Returns:
            List[str]: Warning messages, empty when the bound holds on the grid.
        """
        x = np.linspace(0.0, 1.0, grid_points)
        peak = float(np.max(np.abs(self.eval(x))))
        if peak > self.bound_M * (1 + 1e-12):
            return [f"|{self.label}| reaches {peak:.6g} > bound_M = {self.bound_M:.6g}"]
        return []


class Potential:
    """
    The coefficient q of -u'' + q u on [0, 1] together with caller-supplied bounds
    on ||q||, ||q'|| and ||q''||.

    `deviation(x)` returns q(x) - 1/2. Potentials built from an integrand keep
    this part separately so that tiny perturbations of the constant potential
    1/2 survive in double precision.
    """

    def __init__(self, func: ArrayFunc, sup_bounds: Tuple[float, float, float], label: str = "q",
                 deviation: Optional[ArrayFunc] = None, feature_width: Optional[float] = None):
        sup_bounds = tuple(float(s) for s in sup_bounds)
        if len(sup_bounds) != 3 or any(s < 0 for s in sup_bounds):
            raise InputError(f"sup_bounds must be three nonnegative reals, got {sup_bounds}")
        self._func = func
        self._deviation = deviation
        self.sup_bounds = sup_bounds
        self.label = label
        self.feature_width = feature_width

    def __repr__(self) -> str:
        return f"<Potential {self.label} bounds={self.sup_bounds}>"

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x) -> np.ndarray:
        return _vectorized(self._func, x)

    def deviation(self, x) -> np.ndarray:
        if self._deviation is not None:
            return _vectorized(self._deviation, x)
        return self.eval(x) - 0.5

    @property
    def admissible(self) -> bool:
        """Declared membership in class Q: all three bounds at most 1."""
        return max(self.sup_bounds) <= 1.0

    def check_range(self, x: np.ndarray, values: Optional[np.ndarray] = None) -> None:
        """
        Raises InputError if q leaves [0, 1] at any of the sample points.
        """
        values = self.eval(x) if values is None else values
        low, high = float(np.min(values)), float(np.max(values))
        if low < 0.0 or high > 1.0:
            logger.error(f"Potential {self.label} leaves [0, 1]: range [{low:.6g}, {high:.6g}]")
            raise InputError(f"Potential {self.label} takes values in [{low:.6g}, {high:.6g}], outside [0, 1]")

    def spot_check(self, grid_points: int = 4096) -> List[str]:
        """
        Checks the declared bounds on a uniform grid, derivatives by finite differences.

        Returns:
            List[str]: Warning messages for every bound the samples exceed.
        """
        x = np.linspace(0.0, 1.0, grid_points)
        h = x[1] - x[0]
        values = self.eval(x)
        estimates = (np.max(np.abs(values)),
                     np.max(np.abs(np.gradient(values, h))),
                     np.max(np.abs(np.diff(values, 2))) / h ** 2)
        warnings = []
        if np.min(values) < 0 or np.max(values) > 1:
            warnings.append(f"{self.label} leaves [0, 1] on the grid")
        # finite differences carry O(h) and O(h^2) errors
        slack = (1e-12, 10 * h, 10 * h)
        for order, (estimate, bound, tol) in enumerate(zip(estimates, self.sup_bounds, slack)):
            if estimate > bound * (1 + tol) + tol:
                warnings.append(f"||{self.label}^({order})|| ~ {estimate:.6g} exceeds declared {bound:.6g}")
        return warnings

    @classmethod
    def constant(cls, value: float) -> "Potential":
        value = float(value)
        return cls(lambda x: np.full_like(x, value), (abs(value), 0.0, 0.0), label=f"const:{value:g}",
                   deviation=lambda x: np.full_like(x, value - 0.5))

    @classmethod
    def linear(cls, a: float, b: float) -> "Potential":
        """q(x) = a + b x."""
        a, b = float(a), float(b)
        return cls(lambda x: a + b * x, (max(abs(a), abs(a + b)), abs(b), 0.0), label=f"linear:{a:g},{b:g}")

    @classmethod
    def sine(cls, amplitude: float, frequency: float) -> "Potential":
        """q(x) = 1/2 + amplitude * sin(2 pi frequency x), centred in class Q."""
        amplitude, frequency = float(amplitude), float(frequency)
        omega = 2 * np.pi * frequency
        width = 1.0 / (2 * abs(frequency)) if frequency else None
        return cls(lambda x: 0.5 + amplitude * np.sin(omega * x),
                   (0.5 + abs(amplitude), abs(amplitude) * abs(omega), abs(amplitude) * omega ** 2),
                   label=f"sine:{amplitude:g},{frequency:g}",
                   deviation=lambda x: amplitude * np.sin(omega * x), feature_width=width)

    @classmethod
    def tabulated(cls, xs: Sequence[float], ys: Sequence[float], label: str = "table") -> "Potential":
        """
        Cubic-spline potential through tabulated samples; bounds are measured on a dense grid.
        """
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 4:
            raise InputError("A tabulated potential needs at least four (x, q) pairs")
        if xs[0] > 0 or xs[-1] < 1 or np.any(np.diff(xs) <= 0):
            raise InputError("Tabulated x values must increase strictly and cover [0, 1]")
        spline = CubicSpline(xs, ys)
        grid = np.linspace(0.0, 1.0, 8193)
        bounds = tuple(float(np.max(np.abs(spline(grid, nu)))) for nu in range(3))
        return cls(lambda x: spline(x), bounds, label=label, feature_width=float(np.min(np.diff(xs))))


def potential_from_integrand(f: SmoothIntegrand, c: float) -> Potential:
    """
    Builds q(x) = 1/2 + c f(x).

    Args:
        f (SmoothIntegrand): The integrand with bound M.
        c (float): Positive scale with c <= 1/(2M).

    Returns:
        Potential: q with sup_bounds (1/2 + cM, cM, cM), each clamped at 1.

    Raises:
        InputError: If c is not positive or exceeds 1/(2M).
    """
    if not c > 0:
        raise InputError(f"c must be positive, got {c}")
    if c * f.bound_M > 0.5 * (1 + 1e-15):
        raise InputError(f"c = {c:.6g} exceeds 1/(2M) = {0.5 / f.bound_M:.6g}; q would leave class Q")
    cm = c * f.bound_M
    bounds = (min(0.5 + cm, 1.0), min(cm, 1.0), min(cm, 1.0))
    return Potential(lambda x: 0.5 + c * f.eval(x), bounds, label=f"1/2+{c:.3g}*{f.label}",
                     deviation=lambda x: c * f.eval(x), feature_width=f.feature_width)
