from dataclasses import dataclass, fields
from functools import reduce
from typing import Dict, Iterable, Optional, Sequence

import pandas as pd

from ..errors import InputError


@dataclass(frozen=True)
class QueryLedger:
    power_queries: int = 0  # controlled W^(2^j) applications, one per exponent
    bit_queries: int = 0  # evaluations of the Boolean or real input oracle
    qubits_peak: int = 0  # ancilla plus target register width
    classical_ops: int = 0  # classical bookkeeping steps (medians, roundings, comparisons)
    verification_queries: int = 0  # confirmation calls, also included in bit_queries

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if int(value) != value or value < 0:
                raise InputError(f"Ledger count '{f.name}' must be a nonnegative integer, got {value}")
            object.__setattr__(self, f.name, int(value))

    def merge(self, other: "QueryLedger") -> "QueryLedger":
        """
        Combines two ledgers: counts add, qubits_peak takes the maximum.
        """
        return QueryLedger(
            power_queries=self.power_queries + other.power_queries,
            bit_queries=self.bit_queries + other.bit_queries,
            qubits_peak=max(self.qubits_peak, other.qubits_peak),
            classical_ops=self.classical_ops + other.classical_ops,
            verification_queries=self.verification_queries + other.verification_queries,
        )

    __add__ = merge

    @classmethod
    def combine(cls, ledgers: Iterable["QueryLedger"]) -> "QueryLedger":
        return reduce(cls.merge, ledgers, cls())

    def to_dict(self) -> Dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def to_frame(cls, ledgers: Sequence["QueryLedger"], index: Optional[Sequence] = None) -> pd.DataFrame:
        """
        Tabulates ledgers, one row per ledger.

        Args:
            ledgers (Sequence[QueryLedger]): The ledgers to tabulate.
            index (Sequence, optional): Row labels, e.g. the problem sizes.

        Returns:
            pd.DataFrame: One column per count.
        """
        frame = pd.DataFrame([ledger.to_dict() for ledger in ledgers],
                             columns=[f.name for f in fields(cls)])
        if index is not None:
            frame.index = pd.Index(index)
        return frame
