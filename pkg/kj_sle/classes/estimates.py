import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from ..errors import InputError
from .phase_estimation_plan import PhaseEstimationPlan
from .query_ledger import QueryLedger


@dataclass(frozen=True)
class EstimateWithConfidence:
    value: float  # the estimate
    eta: float  # guaranteed accuracy
    delta: float  # failure probability
    ledger: QueryLedger = field(default_factory=QueryLedger)
    flags: Tuple[str, ...] = ()  # conditions noticed during the run

    def __post_init__(self):
        if not self.eta > 0:
            raise InputError(f"eta must be positive, got {self.eta}")
        if not 0 < self.delta < 1:
            raise InputError(f"delta must lie in (0, 1), got {self.delta}")

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "eta": self.eta, "delta": self.delta,
                "ledger": self.ledger.to_dict(), "flags": list(self.flags)}


@dataclass(frozen=True)
class LambdaEstimate(EstimateWithConfidence):
    excess: float = 0.0  # value - pi^2 - 1/2, carried at full relative precision
    backend: str = "classical"
    plan: Optional[PhaseEstimationPlan] = None

    def to_dict(self) -> Dict[str, Any]:
        result = super().to_dict()
        result.update(excess=self.excess, backend=self.backend,
                      plan=self.plan.to_dict() if self.plan is not None else None)
        return result


@dataclass(frozen=True)
class IntegralEstimate(EstimateWithConfidence):
    c: Optional[float] = None  # potential scale, None in the trivial regime
    lambda_estimate: Optional[LambdaEstimate] = None

    def to_dict(self) -> Dict[str, Any]:
        result = super().to_dict()
        result.update(c=self.c, lambda_eta=self.lambda_estimate.eta if self.lambda_estimate else None)
        return result


@dataclass(frozen=True)
class MeanEstimate(EstimateWithConfidence):
    N: int = 1

    @property
    def rounded(self) -> float:
        """floor(N x + 1/2) / N clipped to [0, 1]; exact whenever eta < 1/(2N)."""
        return round_mean(self.value, self.N)

    @property
    def rounded_count(self) -> int:
        return int(round(self.rounded * self.N))

    def to_dict(self) -> Dict[str, Any]:
        result = super().to_dict()
        result.update(N=self.N, rounded=self.rounded)
        return result


def round_mean(value: float, N: int) -> float:
    count = math.floor(N * value + 0.5)
    return min(max(count, 0), N) / N


@dataclass(frozen=True)
class Decision:
    answer: bool
    delta: float
    ledger: QueryLedger = field(default_factory=QueryLedger)
    estimate: Optional[EstimateWithConfidence] = None

    @property
    def verdict(self) -> str:
        return "YES" if self.answer else "NO"

    def to_dict(self) -> Dict[str, Any]:
        return {"answer": self.verdict, "delta": self.delta, "ledger": self.ledger.to_dict()}


@dataclass(frozen=True)
class IndexResult:
    index: Optional[int]  # None when no valid index was found
    confirmed: bool  # outcome of the final confirmation query
    delta: float
    ledger: QueryLedger = field(default_factory=QueryLedger)
    flags: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {"index": self.index, "confirmed": self.confirmed, "delta": self.delta,
                "ledger": self.ledger.to_dict(), "flags": list(self.flags)}
