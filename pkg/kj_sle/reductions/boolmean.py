import math
import threading
from typing import Optional, Union

import numpy as np

from kj_logger import get_logger

from ..classes.boolean_oracle import BooleanOracle
from ..classes.bump_family import BumpFamily
from ..classes.estimates import MeanEstimate
from ..classes.phase_estimation_plan import Backend, PhaseEstimationPlan
from ..classes.potential import SmoothIntegrand
from ..classes.query_ledger import QueryLedger
from ..core_config import SleConfig, get_config
from ..errors import InputError
from ..solvers.qpe import RngLike, make_plan
from ..utils.validate import validate_positive, validate_probability
from .integrate import integrate_weighted, integration_constants, make_bump_family

logger = get_logger(__name__)


class _CellMemo:
    """One oracle call per touched cell, shared by all evaluations of one integrand."""

    def __init__(self, oracle: BooleanOracle):
        self.oracle = oracle
        self._bits = np.full(oracle.N, -1, dtype=np.int64)
        self._lock = threading.Lock()

    def lookup(self, cells: np.ndarray) -> np.ndarray:
        wanted = np.unique(cells[cells >= 0])
        with self._lock:
            for j in wanted[self._bits[wanted] < 0].tolist():
                self._bits[j] = self.oracle(j)
        return np.where(cells >= 0, self._bits[cells], 0)


def mean_integrand_bound(family: BumpFamily, config: SleConfig) -> float:
    """Class constant M of the family, inflated by 1 + mean_bound_slack / N for the 1/sin^2 factor."""
    return family.m_const * (1 + config.mean_bound_slack / family.N)


def _assemble(B: BooleanOracle, family: BumpFamily, weighted: bool, config: SleConfig) -> SmoothIntegrand:
    if family.N != B.N:
        raise InputError(f"Bump family has N={family.N} cells but the oracle has N={B.N}")
    memo = _CellMemo(B)
    N = family.N

    def func(x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        cells, bumps = family.bumps(flat)
        live = cells >= 0
        bits = memo.lookup(cells)
        factor = cells / N if weighted else 1.0
        denominator = np.where(live, 2.0 * np.sin(np.pi * flat) ** 2, 1.0)
        return (bumps * bits * factor / denominator).reshape(x.shape)

    bound = mean_integrand_bound(family, config)
    name = "g" if weighted else "f"
    return SmoothIntegrand(func, bound, label=f"{name}_{B.label}", feature_width=family.cell_width,
                           breakpoints=tuple(family.edges))


def assemble_mean_integrand(B: BooleanOracle, family: BumpFamily, config: Optional[SleConfig] = None
                            ) -> SmoothIntegrand:
    """
    f_B(x) = h_j(x) B(j) / (2 sin^2(pi x)) on cell j, zero outside [1/4, 3/4].

    I(f_B) = int_h S_N(B) / (16 N^2). Each cell's bit is fetched once per integrand.
    """
    return _assemble(B, family, weighted=False, config=get_config(config))


def assemble_weighted_integrand(B: BooleanOracle, family: BumpFamily, config: Optional[SleConfig] = None
                                ) -> SmoothIntegrand:
    """
    g_B(x) = j h_j(x) B(j) / (2 N sin^2(pi x)) on cell j; I(g_B) = int_h sum_j j B(j) / (16 N^4).
    """
    return _assemble(B, family, weighted=True, config=get_config(config))


def boolean_mean(B: BooleanOracle, eps: float, delta: float, backend: Union[str, Backend, None] = None,
                 rng: RngLike = None, config: Optional[SleConfig] = None, seed: Optional[int] = None
                 ) -> MeanEstimate:
    """
    Estimates S_N(B) = (1/N) sum_j B(j) to accuracy eps through one weighted integration.

    The integral is requested at accuracy int_h eps / (16 N^2) and rescaled by 16 N^2 / int_h.
    For eps < 1/(2N) the `rounded` value of the result is exact.

    Raises:
        InputError: If eps is not in (0, 1).
    """
    config = get_config(config)
    eps = validate_positive(eps, "eps", upper=1.0)
    delta = validate_probability(delta)
    family = make_bump_family(B.N, config=config)
    integrand = assemble_mean_integrand(B, family, config)
    scale = 16 * B.N ** 2 / family.int_h

    calls_before = B.counter
    estimate = integrate_weighted(integrand, eps / scale, delta, backend, rng=rng, config=config, seed=seed)
    calls = B.counter - calls_before
    value = scale * estimate.value
    ledger = estimate.ledger + QueryLedger(bit_queries=calls, classical_ops=1)
    logger.debug(f"S_N({B.label}) ~ {value:.9g} (N={B.N}, {calls} oracle calls)")
    return MeanEstimate(value=value, eta=eps, delta=delta, ledger=ledger, flags=estimate.flags, N=B.N)


def bit_query_comparison(N: int, eps: float) -> int:
    """Bit-query count min(N, 1/eps) of amplitude-amplification mean estimation, for comparison only."""
    return min(N, math.ceil(1.0 / eps))


def plan_boolean_mean(N: int, eps: float, delta: float, backend: Union[str, Backend, None] = None,
                      config: Optional[SleConfig] = None) -> PhaseEstimationPlan:
    """
    The phase estimation plan boolean_mean would run for N cells, without running it.

    Query counts depend on the oracle only through N, so ledgers of large instances
    can be tabulated from plans.
    """
    config = get_config(config)
    eps = validate_positive(eps, "eps", upper=1.0)
    family = make_bump_family(N, config=config)
    bound = mean_integrand_bound(family, config)
    eps_int = eps / (16 * N ** 2 / family.int_h)
    if eps_int >= bound:
        raise InputError(f"eps={eps:g} is in the trivial regime for N={N}; no eigenvalue is estimated")
    _, eta = integration_constants(0.5 if eps_int >= 1.0 else eps_int, bound, config)
    return make_plan(eta, delta, backend, config=config)
