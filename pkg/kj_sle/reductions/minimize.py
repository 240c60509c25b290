import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from kj_logger import get_logger

from ..classes.boolean_oracle import BooleanOracle
from ..classes.bounded_vector import BoundedVector
from ..classes.estimates import EstimateWithConfidence, IndexResult
from ..classes.phase_estimation_plan import Backend
from ..classes.query_ledger import QueryLedger
from ..core_config import SleConfig, get_config
from ..errors import InputError
from ..solvers.qpe import RngLike, as_generator
from ..utils.path_utils import read_text_file
from ..utils.validate import split_confidence, validate_positive, validate_probability
from .boolmean import boolean_mean
from .sat import sat_decide, sat_search

logger = get_logger(__name__)


@dataclass(frozen=True)
class BisectionStep:
    lower: float
    upper: float
    threshold: float
    answer: bool  # some x_j <= threshold


@dataclass(frozen=True)
class MinEstimate(EstimateWithConfidence):
    trace: Tuple[BisectionStep, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        result = super().to_dict()
        result.update(steps=len(self.trace))
        return result


@dataclass(frozen=True)
class MinIndexResult(IndexResult):
    threshold: Optional[float] = None  # y at the time of the search
    entry: Optional[float] = None  # x_j of the returned index

    def to_dict(self) -> Dict[str, Any]:
        result = super().to_dict()
        result.update(threshold=self.threshold, entry=self.entry)
        return result


def threshold_oracle(x: BoundedVector, y: float) -> BooleanOracle:
    """f_y(j) = 1 iff x_j <= y; every evaluation reads one entry of x."""
    return BooleanOracle(x.n, lambda j: 1 if x.entry(j) <= y else 0, label=f"{x.label}<={y:.6g}")


def bisection_steps(bound_M: float, eps: float) -> int:
    """Number of halvings k* = ceil(log2(M / eps)) that shrink [-M, M] to width 2 eps."""
    return max(1, math.ceil(math.log2(bound_M / eps)))


def min_value(x: BoundedVector, eps: float, delta: float, backend: Union[str, Backend, None] = None,
              rng: RngLike = None, config: Optional[SleConfig] = None, seed: Optional[int] = None) -> MinEstimate:
    """
    eps-approximation of min_j x_j by bisection of [-M, M].

    Each step asks sat_decide whether f_y has a satisfying index for the midpoint y and
    keeps the half that holds the minimum. The k* decisions run at the per-step failure
    probability 1 - (1 - delta)^(1/k*).

    Raises:
        InputError: If eps >= M.
    """
    config = get_config(config)
    eps = validate_positive(eps, "eps")
    delta = validate_probability(delta)
    if eps >= x.bound_M:
        raise InputError(f"eps={eps:g} must be smaller than M={x.bound_M:g}; [-M, M] already locates the minimum")
    steps = bisection_steps(x.bound_M, eps)
    step_delta = split_confidence(delta, steps)
    generator = as_generator(rng, seed)

    lower, upper = -x.bound_M, x.bound_M
    y = 0.0
    ledger = QueryLedger()
    trace: List[BisectionStep] = []
    for _ in range(steps):
        decision = sat_decide(threshold_oracle(x, y), step_delta, backend, rng=generator, config=config)
        ledger += decision.ledger
        trace.append(BisectionStep(lower, upper, y, decision.answer))
        if decision.answer:
            upper = y
        else:
            lower = y
        y = (lower + upper) / 2
    logger.debug(f"min({x.label}) ~ {y:.9g} after {steps} steps, interval [{lower:.6g}, {upper:.6g}]")
    return MinEstimate(value=y, eta=eps, delta=delta, ledger=ledger + QueryLedger(classical_ops=steps),
                       trace=tuple(trace))


def min_index(x: BoundedVector, eps: float, delta: float, backend: Union[str, Backend, None] = None,
              rng: RngLike = None, config: Optional[SleConfig] = None, seed: Optional[int] = None
              ) -> MinIndexResult:
    """
    Index j with x_j <= min x + eps.

    Steps, each at failure probability 1 - (1 - delta)^(1/3):
        1. y from min_value.
        2. The exact count of f_y from the Boolean mean; if it is 0, y is raised by eps.
        3. The smallest satisfying index of f_y from sat_search.

    The closing confirmation of sat_search is the comparison x_j <= y. Among
    eps-minimizers the smallest index is returned.

    Raises:
        InputError: If eps >= M.
    """
    config = get_config(config)
    delta = validate_probability(delta)
    step_delta = split_confidence(delta, 3)
    generator = as_generator(rng, seed)

    value = min_value(x, eps, step_delta, backend, rng=generator, config=config)
    y = value.value
    ledger = value.ledger
    count = boolean_mean(threshold_oracle(x, y), 1.0 / (3 * x.N), step_delta, backend, rng=generator, config=config)
    ledger += count.ledger + QueryLedger(classical_ops=1)
    if count.rounded_count == 0:
        logger.debug(f"No entry of {x.label} at or below {y:.6g}; raising the threshold by {eps:g}")
        y += eps

    search = sat_search(threshold_oracle(x, y), step_delta, backend, rng=generator, config=config)
    ledger += search.ledger
    entry = None
    if search.confirmed:
        entry = x.entry(search.index)
        ledger += QueryLedger(bit_queries=1, verification_queries=1)
    else:
        logger.warning(f"min_index({x.label}): no index with x_j <= {y:.6g}")
    return MinIndexResult(index=search.index, confirmed=search.confirmed, delta=delta, ledger=ledger,
                          flags=search.flags, threshold=y, entry=entry)


def parse_vector_text(text: str) -> List[float]:
    """One real per line; blank lines and lines starting with '#' are skipped."""
    values = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise InputError(f"Line {number}: '{line}' is not a number") from None
    if not values:
        raise InputError("Vector file holds no values")
    return values


def read_vector_file(path: Union[str, Path], bound_M: Optional[float] = None) -> BoundedVector:
    return BoundedVector.from_values(parse_vector_text(read_text_file(path)), bound_M=bound_M)
