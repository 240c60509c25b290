"""
Simulated phase estimation with power queries on W = exp(i M_q / 2).

An eigenvalue lambda of M_q is an eigenphase lambda / (4 pi) of W. One run puts
the discrete sine vector in the target register, applies controlled
W^(2^j) for j < b and an inverse QFT, and measures b ancilla bits. The
median of r runs is the estimate.

The dense backend simulates the state vector. The spectral backend samples
from the exact outcome law, sum_i w_i K_b(phi_i - m / 2^b), with K_b the
squared Dirichlet kernel. Both draw an outcome from a single uniform number
through the inverse CDF, so equal seeds give equal samples whenever the two
laws agree.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import mpmath
import numpy as np
from scipy.linalg import expm
from scipy.stats import binom

from kj_logger import get_logger

from ..classes.estimates import LambdaEstimate
from ..classes.phase_estimation_plan import Backend, PhaseEstimationPlan, PhaseSample
from ..classes.potential import Potential
from ..classes.query_ledger import QueryLedger
from ..classes.tridiagonal_system import TridiagonalSystem, build_matrix
from ..core_config import SleConfig, get_config
from ..errors import CapacityError, InputError
from ..utils.runtime_manager import dec_runtime
from ..utils.validate import validate_positive, validate_probability
from .eigen import LAMBDA_HALF, leading_eigenpairs, reference_excess, sine_vector

logger = get_logger(__name__)

MAX_OUTCOME_BITS = 62  # outcomes are stored as int64
EXTRA_PRECISION_BITS = 64

RngLike = Union[None, int, np.random.Generator]


def make_plan(eta: float, delta: float, backend: Union[str, Backend, None] = None, seed: Optional[int] = None,
              config: Optional[SleConfig] = None) -> PhaseEstimationPlan:
    """
    Chooses grid size, phase bits and repetitions for accuracy eta and confidence 1 - delta.

    k is the smallest 2^e - 1 with c_disc (k+1)^-2 <= eta/2, b = ceil(log2(8 pi / eta)) + guard_bits,
    and r is the smallest odd integer >= chernoff_c ln(1/delta) + 1.

    Raises:
        InputError: If eta is not in (0, 1) or delta not in (0, 1).
        CapacityError: If a simulated backend would need k above its cap, spectral_k_cap
            for the spectral backend and k_cap for the dense one.
    """
    config = get_config(config)
    eta = validate_positive(eta, "eta", upper=1.0)
    delta = validate_probability(delta)
    backend = Backend.parse(backend, config.backend)

    half_eta = eta / 2
    exponent = max(1, math.ceil(0.5 * math.log2(2 * config.c_disc / eta)))
    while config.c_disc / 4.0 ** exponent > half_eta:
        exponent += 1
    while exponent > 1 and config.c_disc / 4.0 ** (exponent - 1) <= half_eta:
        exponent -= 1
    k = 2 ** exponent - 1
    b = math.ceil(math.log2(8 * math.pi / eta)) + config.guard_bits
    r = math.ceil(config.chernoff_c * math.log(1 / delta) + 1)
    if r % 2 == 0:
        r += 1

    cap = config.spectral_k_cap if backend is Backend.SPECTRAL else config.k_cap
    if backend.is_quantum and k > cap:
        logger.error(f"eta={eta:.3g} needs k={k} above the {backend.value} cap {cap}")
        raise CapacityError(f"Accuracy beyond backend capacity: eta={eta:.3g} needs k={k} > {cap} ({backend.value})")
    plan = PhaseEstimationPlan(k=k, b=b, r=r, backend=backend, eta=eta, delta=delta, seed=seed)
    logger.debug(f"Plan for eta={eta:.3g}, delta={delta:.3g}: k={k}, b={b}, r={r}, backend={backend.value}")
    return plan


def initial_state(k: int) -> np.ndarray:
    """Normalized discrete sine vector, the ground state of the constant-potential matrix."""
    if int(k) != k or k < 1:
        raise InputError(f"k must be a positive integer, got {k}")
    return sine_vector(int(k))


@dataclass(frozen=True)
class PhaseDistribution:
    b: int
    outcomes: np.ndarray  # sorted, int64
    probabilities: np.ndarray  # normalized over `outcomes`
    deficit: float = 0.0  # probability mass dropped by truncation, charged to delta

    def __post_init__(self):
        cdf = np.cumsum(self.probabilities)
        cdf[-1] = 1.0
        object.__setattr__(self, "_cdf", cdf)

    def sample(self, rng: np.random.Generator, target_qubits: int = 0) -> PhaseSample:
        """Inverse-CDF draw from a single uniform number."""
        u = rng.random()
        position = min(int(np.searchsorted(self._cdf, u, side="right")), len(self.outcomes) - 1)
        return PhaseSample(int(self.outcomes[position]), self.b, target_qubits)

    def probability(self, outcome: int) -> float:
        position = np.searchsorted(self.outcomes, outcome)
        if position < len(self.outcomes) and self.outcomes[position] == outcome:
            return float(self.probabilities[position])
        return 0.0

    @property
    def mode(self) -> int:
        return int(self.outcomes[np.argmax(self.probabilities)])

    def total_variation(self, other: "PhaseDistribution") -> float:
        support = np.union1d(self.outcomes, other.outcomes)
        p = np.zeros(len(support))
        q = np.zeros(len(support))
        p[np.searchsorted(support, self.outcomes)] = self.probabilities
        q[np.searchsorted(support, other.outcomes)] = other.probabilities
        return 0.5 * float(np.sum(np.abs(p - q)))


def dirichlet_kernel(offset: np.ndarray, b: int) -> np.ndarray:
    """
    K_b at phase difference offset / 2^b: sin^2(pi offset) / (2^(2b) sin^2(pi offset / 2^b)), 1 at offset 0.
    """
    offset = np.asarray(offset, dtype=float)
    scale = 2.0 ** b
    denominator = (scale * np.sin(np.pi * offset / scale)) ** 2
    numerator = np.sin(np.pi * offset) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        values = numerator / denominator
    return np.where(offset == 0, 1.0, values)


def _split_phase(lam: mpmath.mpf, b: int):
    """Nearest grid outcome below lambda / (4 pi) * 2^b and the fractional remainder."""
    scaled = mpmath.frac(lam / (4 * mpmath.pi)) * 2 ** b
    anchor = int(mpmath.floor(scaled))
    return anchor, float(scaled - anchor)


def _ground_lambda_mp(k: int, shift: float) -> mpmath.mpf:
    """lambda_k(1/2) + shift in extended precision."""
    kp1 = mpmath.mpf(k + 1)
    return mpmath.mpf(0.5) + 4 * kp1 ** 2 * mpmath.sin(mpmath.pi / (2 * kp1)) ** 2 + mpmath.mpf(shift)


def _spectral_components(T: TridiagonalSystem, b: int, config: SleConfig):
    """Eigenvalues (mpmath) and initial-state weights of the retained eigenpairs."""
    if T.k <= config.spectral_sturm_k_max:
        psi = initial_state(T.k)
        count = min(T.k, 8)
        while True:
            pairs = leading_eigenpairs(T, count)
            weights = [float(np.dot(pair.vector, psi)) ** 2 for pair in pairs]
            residual = 1.0 - sum(weights)
            if residual <= config.spectral_residual_tol or count == T.k:
                break
            count = min(T.k, 2 * count)
        logger.debug(f"Spectral sampler keeps {count} eigenpairs, residual weight {residual:.3g}")
        return [mpmath.mpf(pair.value) for pair in pairs], weights

    reference = reference_excess(T.potential, tol=math.pi / 2 ** (b + 1), config=config)
    shift = reference.shift_at(T.k)
    logger.debug(f"Spectral sampler uses the ground pair only at k={T.k}: shift={shift:.17g}, "
                 f"weight={reference.overlap_weight:.17g}")
    return [_ground_lambda_mp(T.k, shift)], [reference.overlap_weight]


@dec_runtime
def spectral_distribution(T: TridiagonalSystem, b: int, delta: float, config: Optional[SleConfig] = None
                          ) -> PhaseDistribution:
    """
    Exact outcome law of phase estimation from eigenpairs of M_q.

    Outcomes are enumerated in full for b <= spectral_full_enum_bits, otherwise within
    spectral_window of each eigenphase. Dropped eigenpair weight and kernel tails form the
    deficit.

    Raises:
        CapacityError: If b exceeds 62 bits or the deficit reaches delta / 10.
    """
    config = get_config(config)
    if b > MAX_OUTCOME_BITS:
        raise CapacityError(f"Phase register of {b} bits exceeds the {MAX_OUTCOME_BITS}-bit outcome index")
    size = 2 ** b
    if b <= config.spectral_full_enum_bits:
        offsets = np.arange(-(size // 2), size - size // 2, dtype=np.int64)
    else:
        offsets = np.arange(-config.spectral_window, config.spectral_window + 1, dtype=np.int64)

    with mpmath.workprec(b + EXTRA_PRECISION_BITS):
        lambdas, weights = _spectral_components(T, b, config)
        anchors = [_split_phase(lam, b) for lam in lambdas]

    deficit = max(0.0, 1.0 - sum(weights))
    all_outcomes, all_mass = [], []
    for (anchor, fraction), weight in zip(anchors, weights):
        kernel = dirichlet_kernel(fraction - offsets, b)
        deficit += weight * max(0.0, 1.0 - float(np.sum(kernel)))
        all_outcomes.append((anchor + offsets) % size)
        all_mass.append(weight * kernel)

    if deficit >= delta / 10:
        logger.error(f"Spectral truncation deficit {deficit:.3g} reaches delta/10 = {delta / 10:.3g}")
        raise CapacityError(f"Spectral truncation deficit {deficit:.3g} is not below delta/10 = {delta / 10:.3g}")

    outcomes, inverse = np.unique(np.concatenate(all_outcomes), return_inverse=True)
    mass = np.bincount(inverse, weights=np.concatenate(all_mass))
    return PhaseDistribution(b, outcomes.astype(np.int64), mass / mass.sum(), deficit)


@dec_runtime
def dense_distribution(T: TridiagonalSystem, b: int, config: Optional[SleConfig] = None) -> PhaseDistribution:
    """
    Outcome law from a full state-vector simulation of the 2^b x k register.

    Raises:
        CapacityError: If b + log2(k+1) exceeds dense_qubit_cap.
    """
    config = get_config(config)
    qubits = b + (T.k + 1).bit_length() - 1
    if qubits > config.dense_qubit_cap:
        raise CapacityError(f"Dense backend needs {qubits} qubits, cap is {config.dense_qubit_cap}")
    size = 2 ** b
    unitary = expm(0.5j * T.to_dense())
    state = np.tile(initial_state(T.k).astype(complex) / math.sqrt(size), (size, 1))
    register = np.arange(size)
    power = unitary
    for j in range(b):
        controlled = ((register >> j) & 1).astype(bool)
        state[controlled] = state[controlled] @ power.T
        power = power @ power
    amplitudes = np.fft.fft(state, axis=0, norm="ortho")
    probabilities = np.sum(np.abs(amplitudes) ** 2, axis=1)
    return PhaseDistribution(b, register.astype(np.int64), probabilities / probabilities.sum())


def phase_distribution(T: TridiagonalSystem, plan: PhaseEstimationPlan, config: Optional[SleConfig] = None
                       ) -> PhaseDistribution:
    if plan.k != T.k:
        raise InputError(f"Plan grid k={plan.k} does not match matrix size {T.k}")
    if plan.backend is Backend.DENSE:
        return dense_distribution(T, plan.b, config)
    if plan.backend is Backend.SPECTRAL:
        return spectral_distribution(T, plan.b, plan.delta, config)
    raise InputError("Phase sampling needs the dense or spectral backend")


def qpe_sample(T: TridiagonalSystem, plan: PhaseEstimationPlan, rng: np.random.Generator,
               config: Optional[SleConfig] = None) -> PhaseSample:
    """One measurement outcome of phase estimation; its ledger holds b power queries."""
    return phase_distribution(T, plan, config).sample(rng, plan.target_qubits)


def readout_excess(outcome: int, b: int) -> float:
    """4 pi outcome / 2^b - pi^2 - 1/2, formed in extended precision."""
    with mpmath.workprec(b + EXTRA_PRECISION_BITS):
        return float(4 * mpmath.pi * outcome / mpmath.mpf(2) ** b - mpmath.pi ** 2 - mpmath.mpf(0.5))


def median_failure_bound(p: float, r: int) -> float:
    """Probability that the median of r runs fails when each run succeeds with probability p."""
    return float(binom.cdf((r - 1) // 2, r, p))


def as_generator(rng: RngLike, seed: Optional[int]) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(seed if rng is None else rng)


def _draw(distribution: PhaseDistribution, generators: Sequence[np.random.Generator], target_qubits: int,
          threads: int) -> List[PhaseSample]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(executor.map(lambda g: distribution.sample(g, target_qubits), generators))
    return [distribution.sample(g, target_qubits) for g in generators]


@dec_runtime
def estimate_lambda(q: Potential, eta: float, delta: float, backend: Union[str, Backend, None] = None,
                    rng: RngLike = None, config: Optional[SleConfig] = None, seed: Optional[int] = None
                    ) -> LambdaEstimate:
    """
    eta-approximation of lambda(q) with probability at least 1 - delta.

    The classical backend extrapolates grid solves to accuracy eta and books the
    power queries the plan would use. The dense and spectral backends draw r runs
    from independent substreams of `rng` and return the median readout.

    Args:
        q (Potential): The potential.
        eta (float): Accuracy in (0, 1).
        delta (float): Failure probability in (0, 1).
        backend: classical, spectral or dense; defaults to the configured backend.
        rng: Generator or seed for the quantum backends.

    Returns:
        LambdaEstimate: value, excess over pi^2 + 1/2 and the ledger.

    Raises:
        CapacityError: If the backend cannot reach eta.
    """
    config = get_config(config)
    plan = make_plan(eta, delta, backend, seed, config)
    ledger = QueryLedger(power_queries=plan.power_queries, qubits_peak=plan.qubits_peak, classical_ops=plan.r + 1)

    if plan.backend is Backend.CLASSICAL:
        reference = reference_excess(q, tol=plan.eta / 4, config=config)
        if not reference.converged:
            raise CapacityError(f"Classical backend reached k={reference.k} with accuracy "
                                f"{reference.achieved:.3g} > eta/4 = {plan.eta / 4:.3g}")
        excess = reference.excess
    else:
        T = build_matrix(q, plan.k, check_points=config.grid_check_points)
        distribution = phase_distribution(T, plan, config)
        generators = as_generator(rng, seed).spawn(plan.r)
        samples = _draw(distribution, generators, plan.target_qubits, config.threads)
        ledger = QueryLedger.combine(sample.ledger for sample in samples) + QueryLedger(classical_ops=plan.r + 1)
        readouts = sorted(readout_excess(sample.outcome, plan.b) for sample in samples)
        excess = readouts[plan.r // 2]
        logger.debug(f"Median of {plan.r} readouts: excess={excess:.17g}, spread "
                     f"[{readouts[0]:.6g}, {readouts[-1]:.6g}]")

    logger.debug(f"lambda({q.label}) ~ {LAMBDA_HALF + excess:.12g} (eta={plan.eta:.3g}, backend={plan.backend.value})")
    return LambdaEstimate(value=LAMBDA_HALF + excess, eta=plan.eta, delta=plan.delta, ledger=ledger,
                          excess=excess, backend=plan.backend.value, plan=plan)
