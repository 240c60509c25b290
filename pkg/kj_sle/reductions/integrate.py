import math
from functools import lru_cache
from typing import Optional, Tuple, Union

from kj_logger import get_logger

from ..classes.bump_family import BumpFamily
from ..classes.estimates import IntegralEstimate
from ..classes.phase_estimation_plan import Backend
from ..classes.potential import SmoothIntegrand, potential_from_integrand
from ..classes.query_ledger import QueryLedger
from ..core_config import SleConfig, get_config
from ..solvers.qpe import RngLike, estimate_lambda
from ..utils.runtime_manager import dec_runtime
from ..utils.validate import validate_positive, validate_power_of_two, validate_probability
from ..verify.quadrature import quadrature

logger = get_logger(__name__)


@lru_cache(maxsize=None)
def _profile_integral(alpha: float) -> float:
    family = BumpFamily(1, int_h=1.0, alpha=alpha)
    return quadrature(family.profile, abs_tol=1e-14)


def make_bump_family(N: int, alpha: Optional[float] = None, config: Optional[SleConfig] = None) -> BumpFamily:
    """
    Bump family on N cells with profile (x(1-x))^alpha; int_h from the quadrature oracle.

    Raises:
        InputError: If N is not a power of two or alpha <= 2.
    """
    config = get_config(config)
    N = validate_power_of_two(N)
    alpha = float(config.bump_alpha if alpha is None else alpha)
    return BumpFamily(N, int_h=_profile_integral(alpha), alpha=alpha)


def _log(value: float, base: str) -> float:
    if base == "2":
        return math.log2(value)
    if base == "10":
        return math.log10(value)
    return math.log(value)


def integration_constants(eps: float, bound_M: float, config: Optional[SleConfig] = None) -> Tuple[float, float]:
    """
    Scale c = min(eps / (M^2 log(1/eps)), 1/(2M)) and eigenvalue accuracy eta = c eps.
    """
    config = get_config(config)
    c = min(eps / (bound_M ** 2 * _log(1.0 / eps, config.log_base)), 1.0 / (2.0 * bound_M))
    return c, c * eps


@dec_runtime
def integrate_weighted(f: SmoothIntegrand, eps: float, delta: float, backend: Union[str, Backend, None] = None,
                       rng: RngLike = None, config: Optional[SleConfig] = None, seed: Optional[int] = None
                       ) -> IntegralEstimate:
    """
    Estimates I(f) = int_0^1 f(x) sin^2(pi x) dx from the smallest eigenvalue of q = 1/2 + c f.

    Since lambda(q) = pi^2 + 1/2 + 2c I(f) + O((cM)^2), the estimate is
    (lambda - pi^2 - 1/2) / (2c), computed from the excess the eigenvalue backend
    carries.

    Args:
        f (SmoothIntegrand): Integrand with bound M.
        eps (float): Target accuracy.
        delta (float): Failure probability.

    Returns:
        IntegralEstimate: The estimate. Flags: "trivial_regime" when eps >= M (value 0),
        "clamped_epsilon" when 1 <= eps < M, "residual_budget_exceeded" when the calibrated
        remainder may exceed its share of eps.
    """
    config = get_config(config)
    eps = validate_positive(eps, "eps")
    delta = validate_probability(delta)
    M = f.bound_M
    flags = []

    if eps >= M:
        logger.warning(f"eps={eps:g} >= M={M:g}: 0 is already an eps-approximation of I({f.label})")
        return IntegralEstimate(value=0.0, eta=eps, delta=delta, flags=("trivial_regime",))
    work_eps = eps
    if eps >= 1.0:
        work_eps = 0.5
        flags.append("clamped_epsilon")
        logger.warning(f"eps={eps:g} >= 1; working at eps=1/2")

    c, eta = integration_constants(work_eps, M, config)
    residual_bound = config.residual_constant * c * M ** 2 / 2
    if residual_bound > config.residual_safety_factor * work_eps:
        flags.append("residual_budget_exceeded")
        logger.warning(f"Remainder bound {residual_bound:.3g} exceeds "
                       f"{config.residual_safety_factor:g} * eps = {config.residual_safety_factor * work_eps:.3g}")

    q = potential_from_integrand(f, c)
    estimate = estimate_lambda(q, eta, delta, backend, rng=rng, config=config, seed=seed)
    value = estimate.excess / (2 * c)
    ledger = estimate.ledger + QueryLedger(classical_ops=2)
    logger.debug(f"I({f.label}) ~ {value:.12g} with c={c:.3g}, eta={eta:.3g}")
    return IntegralEstimate(value=value, eta=eps, delta=delta, ledger=ledger, flags=tuple(flags), c=c,
                            lambda_estimate=estimate)
