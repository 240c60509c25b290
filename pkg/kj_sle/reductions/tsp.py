import json
import math
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from kj_logger import get_logger

from ..classes.bounded_vector import BoundedVector
from ..classes.estimates import Decision
from ..classes.phase_estimation_plan import Backend
from ..classes.query_ledger import QueryLedger
from ..core_config import SleConfig, get_config
from ..errors import ConvergenceError, InputError, VerificationError
from ..solvers.qpe import RngLike, as_generator
from ..utils.path_utils import read_text_file
from ..utils.validate import split_confidence, validate_probability
from .minimize import min_index, min_value, threshold_oracle
from .sat import sat_decide

logger = get_logger(__name__)

Tour = Tuple[int, ...]  # cities 1..m


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """
    Integer distances between m >= 2 cities: d(j, j) = 0 and d(j, k) >= 1 otherwise.

    Symmetry is not required.
    """
    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InputError(f"Distance matrix must be square, got shape {d.shape}")
        if d.shape[0] < 2:
            raise InputError("A tour needs at least 2 cities")
        if not np.all(np.equal(np.mod(d, 1), 0)):
            raise InputError("Distances must be integers")
        d = d.astype(np.int64)
        if np.any(np.diag(d) != 0):
            raise InputError("Diagonal distances must be 0")
        off_diagonal = d[~np.eye(d.shape[0], dtype=bool)]
        if np.any(off_diagonal < 1):
            raise InputError("Distances between different cities must be positive")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def m(self) -> int:
        return int(self.d.shape[0])

    @property
    def d_max(self) -> int:
        return int(self.d.max())

    def __call__(self, a: int, b: int) -> int:
        """Distance between cities a and b, numbered from 1."""
        return int(self.d[a - 1, b - 1])

    def to_dict(self) -> Dict[str, Any]:
        return {"m": self.m, "d": self.d.tolist()}

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "DistanceMatrix":
        return cls(np.array(rows))


class PermutationCodec:
    """
    Lehmer-order unranking of {0, ..., m! - 1} onto permutations of 1..m.

    The index space is padded to N = 2^n, n = ceil(log2 m!); indices j >= m! decode
    like m! - 1.
    """

    def __init__(self, m: int):
        if m < 1:
            raise InputError(f"m must be positive, got {m}")
        self.m = m
        self.size = math.factorial(m)
        self.n = (self.size - 1).bit_length()
        self.N = 2 ** self.n

    def __repr__(self) -> str:
        return f"<PermutationCodec m={self.m} n={self.n}>"

    def decode(self, j: int) -> Tour:
        if not 0 <= j < self.N:
            raise InputError(f"Index {j} outside [0, {self.N})")
        j = min(j, self.size - 1)
        remaining = list(range(1, self.m + 1))
        tour = []
        for position in range(self.m - 1, -1, -1):
            digit, j = divmod(j, math.factorial(position))
            tour.append(remaining.pop(digit))
        return tuple(tour)

    def rank(self, tour: Sequence[int]) -> int:
        if sorted(tour) != list(range(1, self.m + 1)):
            raise InputError(f"{list(tour)} is not a permutation of 1..{self.m}")
        remaining = list(range(1, self.m + 1))
        j = 0
        for position, city in enumerate(tour):
            digit = remaining.index(city)
            remaining.pop(digit)
            j += digit * math.factorial(self.m - 1 - position)
        return j


def decode_permutation(j: int, m: int) -> Tour:
    return PermutationCodec(m).decode(j)


def tour_length(D: DistanceMatrix, tour: Sequence[int]) -> int:
    """Closed tour length, including the edge back to the first city."""
    return sum(D(tour[i], tour[(i + 1) % len(tour)]) for i in range(len(tour)))


class TourLengthVector(BoundedVector):
    """
    x_j = tour_length(decode(j)) over N = 2^n indices, computed on first access and kept.
    """

    def __init__(self, D: DistanceMatrix, bound_M: Optional[float] = None):
        self.D = D
        self.codec = PermutationCodec(D.m)
        super().__init__(self.codec.n, bound_M or D.m * D.d_max, label=f"tours{D.m}")
        self._memo: Dict[int, int] = {}
        self._memo_lock = threading.Lock()

    def entry(self, j: int) -> float:
        j = min(int(j), self.codec.size - 1)
        with self._memo_lock:
            if j not in self._memo:
                self._memo[j] = tour_length(self.D, self.codec.decode(j))
            return float(self._memo[j])


@dataclass(frozen=True)
class DistanceBound:
    bound_M: int
    steps: int
    delta: float
    ledger: QueryLedger


@dataclass(frozen=True)
class TourResult:
    length: int
    tour: Tour
    index: int
    bound_M: int
    delta: float
    ledger: QueryLedger

    def to_dict(self) -> Dict[str, Any]:
        return {"length": self.length, "tour": list(self.tour), "index": self.index, "bound_M": self.bound_M,
                "delta": self.delta, "ledger": self.ledger.to_dict()}


def bound_cap(D: DistanceMatrix) -> int:
    """p = ceil(log2(m d_max)), so every tour is at most 2^p."""
    return (D.m * D.d_max - 1).bit_length()


def estimate_distance_bound(D: DistanceMatrix, delta_half: float, backend: Union[str, Backend, None] = None,
                            rng: RngLike = None, config: Optional[SleConfig] = None, seed: Optional[int] = None
                            ) -> DistanceBound:
    """
    Smallest power of two M = 2^k found to bound all tour lengths.

    For k = 0, 1, ..., p the complement of the threshold oracle f_{2^k} is tested with
    sat_decide; the first NO means no tour is longer than 2^k.

    Args:
        D (DistanceMatrix): The instance.
        delta_half (float): Failure probability of the whole loop, split over its p + 1 steps.

    Raises:
        ConvergenceError: If every step up to 2^p answers YES, which correct verdicts rule out.
    """
    config = get_config(config)
    delta_half = validate_probability(delta_half, "delta_half")
    p = bound_cap(D)
    step_delta = split_confidence(delta_half, p + 1)
    generator = as_generator(rng, seed)
    x = TourLengthVector(D, bound_M=2 ** p)
    ledger = QueryLedger()
    for k in range(p + 1):
        decision = sat_decide(threshold_oracle(x, 2 ** k).complement(), step_delta, backend, rng=generator,
                              config=config)
        ledger += decision.ledger
        if not decision.answer:
            logger.debug(f"All tours of {D.m} cities are at most {2 ** k}")
            return DistanceBound(bound_M=2 ** k, steps=k + 1, delta=delta_half, ledger=ledger)
    raise ConvergenceError(f"Bound loop exceeded p={p}: some tour reported longer than {2 ** p}")


def _solve(D: DistanceMatrix, delta: float, backend, rng: RngLike, config: Optional[SleConfig],
           seed: Optional[int]) -> TourResult:
    config = get_config(config)
    delta = validate_probability(delta)
    half = split_confidence(delta, 2)
    generator = as_generator(rng, seed)
    bound = estimate_distance_bound(D, half, backend, rng=generator, config=config)
    x = TourLengthVector(D, bound_M=bound.bound_M)
    found = min_index(x, 1 / 3, half, backend, rng=generator, config=config)
    ledger = bound.ledger + found.ledger
    if not found.confirmed:
        raise VerificationError(f"No tour of {D.m} cities found at or below {found.threshold:.6g}")
    tour = x.codec.decode(found.index)
    length = tour_length(D, tour)
    if length != found.entry:
        raise VerificationError(f"Tour {list(tour)} re-scores to {length}, the vector holds {found.entry}")
    logger.info(f"Tour {list(tour)} of length {length} (index {found.index}, M={bound.bound_M})")
    return TourResult(length=length, tour=tour, index=found.index, bound_M=bound.bound_M, delta=delta,
                      ledger=ledger + QueryLedger(classical_ops=1))


def tsp_decide(D: DistanceMatrix, bound: int, delta: float, backend: Union[str, Backend, None] = None,
               rng: RngLike = None, config: Optional[SleConfig] = None, seed: Optional[int] = None) -> Decision:
    """
    YES iff some tour has length at most `bound`.

    Both the distance bound and the minimum at accuracy 1/3 run at failure probability
    1 - sqrt(1 - delta). Tour lengths are integers, so the rounded minimum is exact.
    """
    if int(bound) != bound or bound < 0:
        raise InputError(f"The tour bound must be a nonnegative integer, got {bound}")
    config = get_config(config)
    delta = validate_probability(delta)
    half = split_confidence(delta, 2)
    generator = as_generator(rng, seed)
    estimate = estimate_distance_bound(D, half, backend, rng=generator, config=config)
    x = TourLengthVector(D, bound_M=estimate.bound_M)
    minimum = min_value(x, 1 / 3, half, backend, rng=generator, config=config)
    shortest = math.floor(minimum.value + 0.5)
    answer = shortest <= bound
    logger.debug(f"tsp_decide: shortest tour ~ {shortest}, bound {bound} -> {'YES' if answer else 'NO'}")
    return Decision(answer=answer, delta=delta, ledger=estimate.ledger + minimum.ledger + QueryLedger(classical_ops=1),
                    estimate=minimum)


def tsp_min_length(D: DistanceMatrix, delta: float, backend: Union[str, Backend, None] = None,
                   rng: RngLike = None, config: Optional[SleConfig] = None, seed: Optional[int] = None
                   ) -> TourResult:
    """Length of a shortest tour; the answer is `length` of the result."""
    return _solve(D, delta, backend, rng, config, seed)


def tsp_optimal_tour(D: DistanceMatrix, delta: float, backend: Union[str, Backend, None] = None,
                     rng: RngLike = None, config: Optional[SleConfig] = None, seed: Optional[int] = None
                     ) -> TourResult:
    """
    A shortest tour; the answer is `tour` of the result.

    Among shortest tours the one with the smallest Lehmer index is returned, and the
    tour is re-scored against the returned length.
    """
    return _solve(D, delta, backend, rng, config, seed)


def parse_matrix_text(text: str) -> DistanceMatrix:
    """
    Reads '{"m": ..., "d": [[...]]}' or a first line m followed by m rows of integers.

    Raises:
        InputError: On malformed input or a matrix that violates the distance rules.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
            m, rows = int(data["m"]), data["d"]
        except (ValueError, KeyError, TypeError) as e:
            raise InputError(f"Malformed JSON matrix: {e}") from e
    else:
        lines = [line.split() for line in stripped.splitlines() if line.strip() and not line.startswith("#")]
        if not lines or len(lines[0]) != 1:
            raise InputError("First line must hold the city count m")
        try:
            m = int(lines[0][0])
            rows = [[int(token) for token in line] for line in lines[1:]]
        except ValueError as e:
            raise InputError(f"Malformed matrix file: {e}") from e
    if len(rows) != m or any(len(row) != m for row in rows):
        raise InputError(f"Expected {m} rows of {m} integers")
    return DistanceMatrix.from_rows(rows)


def read_matrix_file(path: Union[str, Path]) -> DistanceMatrix:
    return parse_matrix_text(read_text_file(path))

