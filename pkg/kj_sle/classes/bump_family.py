from functools import cached_property
from typing import Tuple

import numpy as np

from ..errors import InputError
from ..utils.validate import validate_power_of_two


class BumpFamily:
    """
    Scaled copies h_j(x) = H(2N(x - x_j)) / (4N^2) of the profile h(t) = (t(1-t))^alpha,
    one per cell [x_j, x_{j+1}] of [1/4, 3/4], x_j = 1/4 + j/(2N).

    Every cell integral equals int_h / (8 N^3).
    """

    def __init__(self, N: int, int_h: float, alpha: float = 3.0):
        self.N = validate_power_of_two(N)
        if alpha <= 2:
            raise InputError(f"alpha must exceed 2, got {alpha}")
        if not int_h > 0:
            raise InputError(f"int_h must be positive, got {int_h}")
        self.alpha = float(alpha)
        self.int_h = float(int_h)

    def __repr__(self) -> str:
        return f"<BumpFamily N={self.N} alpha={self.alpha:g}>"

    def profile(self, t, derivative: int = 0) -> np.ndarray:
        """h or one of its first two derivatives, zero outside (0, 1)."""
        t = np.asarray(t, dtype=float)
        inside = (t > 0) & (t < 1)
        ts = np.where(inside, t, 0.5)
        u, du = ts * (1 - ts), 1 - 2 * ts
        a = self.alpha
        if derivative == 0:
            values = u ** a
        elif derivative == 1:
            values = a * u ** (a - 1) * du
        elif derivative == 2:
            values = a * (a - 1) * u ** (a - 2) * du ** 2 - 2 * a * u ** (a - 1)
        else:
            raise InputError(f"Only derivatives up to order 2 are available, got {derivative}")
        return np.where(inside, values, 0.0)

    @cached_property
    def profile_norms(self) -> Tuple[float, float, float]:
        """Sup norms of h, h', h'' measured on a fine grid containing t = 1/2."""
        t = np.linspace(0.0, 1.0, 20001)
        return tuple(float(np.max(np.abs(self.profile(t, d)))) for d in range(3))

    @property
    def m_const(self) -> float:
        h0, h1, h2 = self.profile_norms
        return max(h0 / (4 * self.N ** 2), h1 / (2 * self.N), h2)

    @property
    def cell_integral(self) -> float:
        return self.int_h / (8 * self.N ** 3)

    @property
    def cell_width(self) -> float:
        return 1.0 / (2 * self.N)

    @property
    def edges(self) -> np.ndarray:
        return 0.25 + np.arange(self.N + 1) / (2 * self.N)

    def cell_index(self, x) -> np.ndarray:
        """Cell j containing x, or -1 outside [1/4, 3/4)."""
        x = np.asarray(x, dtype=float)
        j = np.floor((x - 0.25) * 2 * self.N).astype(np.int64)
        return np.where((j >= 0) & (j < self.N), j, -1)

    def bump(self, j: int, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.profile(2 * self.N * (x - 0.25 - j / (2 * self.N))) / (4 * self.N ** 2)

    def bumps(self, x) -> Tuple[np.ndarray, np.ndarray]:
        """
        Cell indices and h_j(x) of the cell containing each point; value 0 where j = -1.
        """
        x = np.asarray(x, dtype=float)
        j = self.cell_index(x)
        t = 2 * self.N * (x - 0.25) - j
        values = np.where(j >= 0, self.profile(t), 0.0) / (4 * self.N ** 2)
        return j, values
