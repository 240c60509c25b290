import threading
from typing import Callable, Iterable, Sequence

from ..errors import InputError
from ..utils.validate import validate_positive_int, validate_power_of_two


class BooleanOracle:
    """
    A 0/1 function on {0, ..., N-1}, N = 2^n, that counts its evaluations.

    Derived oracles (restrictions, complements) evaluate through their parent,
    so the parent's counter sees every call as well.
    """

    def __init__(self, n: int, func: Callable[[int], int], label: str = "B"):
        self.n = validate_positive_int(n, "n", minimum=0)
        self.N = 2 ** self.n
        self._func = func
        self.label = label
        self._lock = threading.Lock()
        self._counter = 0

    def __repr__(self) -> str:
        return f"<BooleanOracle {self.label} n={self.n} calls={self._counter}>"

    def __call__(self, j: int) -> int:
        j = int(j)
        if not 0 <= j < self.N:
            raise InputError(f"Oracle {self.label} queried at {j}, outside [0, {self.N})")
        with self._lock:
            self._counter += 1
        value = self._func(j)
        if value not in (0, 1):
            raise InputError(f"Oracle {self.label} returned {value!r} at {j}, expected 0 or 1")
        return int(value)

    @property
    def counter(self) -> int:
        with self._lock:
            return self._counter

    def restrict(self, offset: int, n_sub: int) -> "BooleanOracle":
        """The oracle j -> B(j + offset) on a block of 2^n_sub indices."""
        size = 2 ** n_sub
        if offset < 0 or offset + size > self.N:
            raise InputError(f"Block [{offset}, {offset + size}) does not fit into [0, {self.N})")
        return BooleanOracle(n_sub, lambda j: self(j + offset), label=f"{self.label}[{offset}:+{size}]")

    def complement(self) -> "BooleanOracle":
        return BooleanOracle(self.n, lambda j: 1 - self(j), label=f"not {self.label}")

    @classmethod
    def from_bits(cls, bits: Sequence[int], label: str = "bits") -> "BooleanOracle":
        table = tuple(int(b) for b in bits)
        N = validate_power_of_two(len(table), "number of bits")
        if any(b not in (0, 1) for b in table):
            raise InputError("Bit vectors may only contain 0 and 1")
        return cls(N.bit_length() - 1, table.__getitem__, label=label)

    @classmethod
    def indicator(cls, n: int, indices: Iterable[int]) -> "BooleanOracle":
        marked = frozenset(int(j) for j in indices)
        if any(not 0 <= j < 2 ** n for j in marked):
            raise InputError(f"Marked indices {sorted(marked)} outside [0, {2 ** n})")
        return cls(n, lambda j: 1 if j in marked else 0, label=f"1{sorted(marked)}")

    @classmethod
    def constant(cls, n: int, value: int) -> "BooleanOracle":
        return cls(n, lambda j: value, label=f"const{value}")
