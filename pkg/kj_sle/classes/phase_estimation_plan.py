import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Union

from ..errors import InputError
from .query_ledger import QueryLedger


class Backend(str, Enum):
    CLASSICAL = "classical"
    SPECTRAL = "spectral"
    DENSE = "dense"

    @classmethod
    def parse(cls, value: Union[str, "Backend", None], default: str = "classical") -> "Backend":
        if value is None:
            value = default
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InputError(f"Unknown backend '{value}', expected one of {[b.value for b in cls]}") from None

    @property
    def is_quantum(self) -> bool:
        return self is not Backend.CLASSICAL


@dataclass(frozen=True)
class PhaseEstimationPlan:
    k: int  # grid size, k + 1 a power of two
    b: int  # ancilla qubits
    r: int  # repetitions, odd
    backend: Backend
    eta: float
    delta: float
    seed: Optional[int] = None

    def __post_init__(self):
        if self.b < 3:
            raise InputError(f"Phase register needs at least 3 qubits, got b={self.b}")
        if self.r < 1 or self.r % 2 == 0:
            raise InputError(f"Repetition count must be odd and positive, got r={self.r}")
        if self.k < 1 or (self.k + 1) & self.k != 0:
            raise InputError(f"k + 1 must be a power of two, got k={self.k}")

    @property
    def target_qubits(self) -> int:
        return (self.k + 1).bit_length() - 1

    @property
    def qubits_peak(self) -> int:
        return self.b + self.target_qubits

    @property
    def power_queries(self) -> int:
        return self.r * self.b

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, "b": self.b, "r": self.r, "backend": self.backend.value,
                "eta": self.eta, "delta": self.delta, "seed": self.seed}


@dataclass(frozen=True)
class PhaseSample:
    outcome: int  # in [0, 2^b)
    b: int
    target_qubits: int = 0

    @property
    def ledger(self) -> QueryLedger:
        """One run of the circuit: b power queries."""
        return QueryLedger(power_queries=self.b, qubits_peak=self.b + self.target_qubits)

    @property
    def phase(self) -> float:
        return self.outcome / 2 ** self.b

    @property
    def lambda_readout(self) -> float:
        return 4 * math.pi * self.phase
