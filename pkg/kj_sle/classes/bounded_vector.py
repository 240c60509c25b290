from typing import Optional, Sequence

import numpy as np

from kj_logger import get_logger

from ..errors import InputError
from ..utils.validate import validate_positive

logger = get_logger(__name__)


class BoundedVector:
    """
    N = 2^n reals with |x_j| <= bound_M, read one entry at a time.

    Subclasses may compute entries on demand by overriding `entry`.
    """

    def __init__(self, n: int, bound_M: float, entries: Optional[Sequence[float]] = None, label: str = "x"):
        self.n = int(n)
        self.N = 2 ** self.n
        self.bound_M = validate_positive(bound_M, "bound_M")
        self.label = label
        self._entries = None
        if entries is not None:
            values = np.asarray(entries, dtype=float)
            if values.shape != (self.N,):
                raise InputError(f"Expected {self.N} entries, got {values.shape}")
            if np.max(np.abs(values)) > self.bound_M:
                raise InputError(f"Entries exceed bound_M = {self.bound_M:g} (max |x_j| = {np.max(np.abs(values)):g})")
            values.setflags(write=False)
            self._entries = values

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.label} N={self.N} M={self.bound_M:g}>"

    def __len__(self) -> int:
        return self.N

    def entry(self, j: int) -> float:
        return float(self._entries[j])

    @property
    def entries(self) -> np.ndarray:
        return np.array([self.entry(j) for j in range(self.N)])

    @classmethod
    def from_values(cls, values: Sequence[float], bound_M: Optional[float] = None) -> "BoundedVector":
        """
        Pads to a power of two by repeating the last entry, which keeps the minimum.

        Args:
            values (Sequence[float]): At least one real.
            bound_M (float, optional): Declared bound; defaults to max |x_j|, or 1 for a zero vector.
        """
        values = [float(v) for v in values]
        if not values:
            raise InputError("A vector needs at least one entry")
        n = (len(values) - 1).bit_length()
        padded = values + [values[-1]] * (2 ** n - len(values))
        if len(padded) != len(values):
            logger.debug(f"Padded vector from {len(values)} to {len(padded)} entries")
        if bound_M is None:
            bound_M = max(abs(v) for v in padded) or 1.0
        return cls(n, bound_M, padded)
