import math
from typing import Optional, Union

from kj_logger import get_logger

from ..classes.boolean_oracle import BooleanOracle
from ..classes.estimates import IndexResult
from ..classes.phase_estimation_plan import Backend
from ..classes.query_ledger import QueryLedger
from ..core_config import SleConfig, get_config
from ..solvers.qpe import RngLike
from ..utils.validate import validate_probability
from .boolmean import assemble_weighted_integrand
from .integrate import integrate_weighted, make_bump_family

logger = get_logger(__name__)

PROMISE_FLAG = "promise_violated_or_unlucky"


def grover_find(B: BooleanOracle, delta: float, backend: Union[str, Backend, None] = None, rng: RngLike = None,
                config: Optional[SleConfig] = None, seed: Optional[int] = None) -> IndexResult:
    """
    Index of the single satisfying input of B from one weighted integration.

    For exactly one j_B with B(j_B) = 1, I(g_B) = int_h j_B / (16 N^4). The integral is
    estimated to int_h / (48 N^4), so 16 N^4 / int_h times the estimate is within 1/3
    of j_B and rounds to it.

    Args:
        B (BooleanOracle): Oracle promised to have exactly one satisfying index.
        delta (float): Failure probability.

    Returns:
        IndexResult: confirmed is the outcome of the closing call B(j). A rounded value
        outside [0, N) or a failed confirmation carries the flag "promise_violated_or_unlucky".
    """
    config = get_config(config)
    delta = validate_probability(delta)
    family = make_bump_family(B.N, config=config)
    integrand = assemble_weighted_integrand(B, family, config)
    scale = 16 * B.N ** 4 / family.int_h

    calls_before = B.counter
    estimate = integrate_weighted(integrand, 1.0 / (3 * scale), delta, backend, rng=rng, config=config, seed=seed)
    ledger = estimate.ledger + QueryLedger(bit_queries=B.counter - calls_before, classical_ops=1)
    j = math.floor(scale * estimate.value + 0.5)
    logger.debug(f"grover_find({B.label}): scaled integral {scale * estimate.value:.6g} -> {j}")

    if not 0 <= j < B.N:
        logger.warning(f"grover_find({B.label}): rounded index {j} outside [0, {B.N})")
        return IndexResult(index=None, confirmed=False, delta=delta, ledger=ledger,
                           flags=estimate.flags + (PROMISE_FLAG,))
    confirmed = B(j) == 1
    ledger += QueryLedger(bit_queries=1, verification_queries=1)
    flags = estimate.flags if confirmed else estimate.flags + (PROMISE_FLAG,)
    if not confirmed:
        logger.warning(f"grover_find({B.label}): B({j}) = 0")
    return IndexResult(index=j, confirmed=confirmed, delta=delta, ledger=ledger, flags=flags)


def grover_bit_query_comparison(n: int) -> int:
    """Bit queries ceil(pi/4 sqrt(2^n)) of amplitude-amplification search, for comparison only."""
    return math.ceil(math.pi / 4 * math.sqrt(2 ** n))
