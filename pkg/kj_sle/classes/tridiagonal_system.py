from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from kj_logger import get_logger

from ..errors import InputError
from .potential import Potential

logger = get_logger(__name__)


class TridiagonalSystem:
    """
    The finite-difference matrix M_q of size k: diagonal 2(k+1)^2 + q((i+1)/(k+1)),
    constant off-diagonal -(k+1)^2.

    Arrays are built on first use, so very large k can be represented as long as
    only the potential and k are consulted.
    """

    def __init__(self, k: int, potential: Potential):
        if int(k) != k or k < 1:
            raise InputError(f"k must be a positive integer, got {k}")
        self.k = int(k)
        self.potential = potential

    def __repr__(self) -> str:
        return f"<TridiagonalSystem k={self.k} q={self.potential.label}>"

    @property
    def scale(self) -> float:
        """(k+1)^2, the Laplacian scale."""
        return float((self.k + 1) ** 2)

    @property
    def offdiag(self) -> float:
        return -self.scale

    @cached_property
    def grid(self) -> np.ndarray:
        return np.arange(1, self.k + 1, dtype=float) / (self.k + 1)

    @cached_property
    def potential_values(self) -> np.ndarray:
        values = self.potential.eval(self.grid)
        values.setflags(write=False)
        return values

    @cached_property
    def deviation_values(self) -> np.ndarray:
        values = self.potential.deviation(self.grid)
        values.setflags(write=False)
        return values

    @cached_property
    def diag(self) -> np.ndarray:
        values = 2 * self.scale + self.potential_values
        values.setflags(write=False)
        return values

    def gershgorin_interval(self) -> Tuple[float, float]:
        radius = 2 * self.scale
        return float(np.min(self.diag)) - radius, float(np.max(self.diag)) + radius

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.diag))) + 2 * self.scale

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[1:] += self.offdiag * v[:-1]
        out[:-1] += self.offdiag * v[1:]
        return out

    def to_dense(self) -> np.ndarray:
        """Dense k x k copy, for small systems only."""
        return (np.diag(self.diag) + np.diag(np.full(self.k - 1, self.offdiag), 1)
                + np.diag(np.full(self.k - 1, self.offdiag), -1))


def build_matrix(q: Potential, k: int, check_points: Optional[int] = 4096) -> TridiagonalSystem:
    """
    Builds M_q on k interior grid points.

    Args:
        q (Potential): The potential.
        k (int): Matrix dimension, at least 1.
        check_points (int, optional): Above this size the range of q is sampled on a uniform
            grid of that many points instead of the matrix grid. None skips the check.

    Returns:
        TridiagonalSystem: M_q.

    Raises:
        InputError: If k < 1 or q leaves [0, 1] at a sampled point.
    """
    system = TridiagonalSystem(k, q)
    if check_points is not None:
        if system.k <= check_points:
            q.check_range(system.grid, system.potential_values)
        else:
            q.check_range(np.linspace(0.0, 1.0, check_points))
    logger.debug(f"Built {system}")
    return system
