from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

from kj_logger import get_logger

from ..classes.boolean_oracle import BooleanOracle
from ..classes.estimates import Decision, IndexResult
from ..classes.phase_estimation_plan import Backend
from ..classes.query_ledger import QueryLedger
from ..core_config import SleConfig, get_config
from ..errors import InputError
from ..solvers.qpe import RngLike, as_generator
from ..utils.path_utils import read_text_file
from ..utils.validate import split_confidence, validate_probability
from .boolmean import boolean_mean

logger = get_logger(__name__)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: Tuple[Tuple[int, ...], ...]  # signed literals, variable v in 1..num_vars

    def __post_init__(self):
        if self.num_vars < 0:
            raise InputError(f"num_vars must be nonnegative, got {self.num_vars}")
        clauses = tuple(tuple(int(lit) for lit in clause) for clause in self.clauses)
        for position, clause in enumerate(clauses):
            if not clause:
                raise InputError(f"Clause {position + 1} is empty")
            for literal in clause:
                if literal == 0 or abs(literal) > self.num_vars:
                    raise InputError(f"Literal {literal} in clause {position + 1} outside [1, {self.num_vars}]")
        object.__setattr__(self, "clauses", clauses)

    @classmethod
    def from_clauses(cls, num_vars: int, clauses: Iterable[Sequence[int]]) -> "CnfFormula":
        return cls(num_vars, tuple(tuple(c) for c in clauses))

    def evaluate(self, assignment: int) -> bool:
        """Bit i of `assignment` is the value of variable i+1."""
        return all(any(((assignment >> (abs(lit) - 1)) & 1) == (lit > 0) for lit in clause)
                   for clause in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(str(lit) for lit in clause) + " 0" for clause in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str, strict: bool = True) -> CnfFormula:
    """
    Parses DIMACS CNF text.

    Args:
        text (str): Comment lines start with 'c', a '%' line ends the input, one header 'p cnf <vars> <clauses>',
            then literals with every clause terminated by 0 (clauses may span lines).
        strict (bool): Require the clause count to match the header.

    Returns:
        CnfFormula: The parsed formula.

    Raises:
        InputError: On a malformed or duplicate header, literals out of range, a missing
            final 0, or (strict) a clause count mismatch.
    """
    header: Optional[Tuple[int, int]] = None
    clauses, current = [], []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("%"):
            break
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise InputError(f"Line {number}: second header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"Line {number}: malformed header '{line}'")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise InputError(f"Line {number}: malformed header '{line}'") from None
            if header[0] < 0 or header[1] < 0:
                raise InputError(f"Line {number}: negative counts in header")
            continue
        if header is None:
            raise InputError(f"Line {number}: clause before the 'p cnf' header")
        for token in line.split():
            try:
                literal = int(token)
            except ValueError:
                raise InputError(f"Line {number}: '{token}' is not an integer literal") from None
            if literal == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(literal) > header[0]:
                raise InputError(f"Line {number}: literal {literal} outside [1, {header[0]}]")
            else:
                current.append(literal)
    if header is None:
        raise InputError("Missing 'p cnf' header")
    if current:
        raise InputError("Last clause is not terminated by 0")
    if len(clauses) != header[1]:
        message = f"Header announces {header[1]} clauses, found {len(clauses)}"
        if strict:
            raise InputError(message)
        logger.warning(message)
    return CnfFormula(header[0], tuple(clauses))


def read_dimacs_file(path: Union[str, Path], strict: bool = True) -> CnfFormula:
    return parse_dimacs(read_text_file(path), strict=strict)


def cnf_oracle(F: CnfFormula) -> BooleanOracle:
    """B(j) = 1 iff the assignment with bit i of j as variable i+1 satisfies F."""
    return BooleanOracle(F.num_vars, lambda j: 1 if F.evaluate(j) else 0, label=f"cnf{F.num_vars}x{len(F.clauses)}")


def sat_decide(B: BooleanOracle, delta: float, backend: Union[str, Backend, None] = None, rng: RngLike = None,
               config: Optional[SleConfig] = None, seed: Optional[int] = None) -> Decision:
    """
    YES iff B has a satisfying index, correct with probability at least 1 - delta.

    Runs the Boolean mean at accuracy 1/(3N), below the rounding threshold 1/(2N),
    and answers YES iff the rounded count is positive.
    """
    delta = validate_probability(delta)
    estimate = boolean_mean(B, 1.0 / (3 * B.N), delta, backend, rng=rng, config=config, seed=seed)
    answer = estimate.rounded_count > 0
    logger.debug(f"sat_decide({B.label}): mean ~ {estimate.value:.6g} -> {'YES' if answer else 'NO'}")
    return Decision(answer=answer, delta=delta, ledger=estimate.ledger + QueryLedger(classical_ops=1),
                    estimate=estimate)


def sat_search(B: BooleanOracle, delta: float, backend: Union[str, Backend, None] = None, rng: RngLike = None,
               config: Optional[SleConfig] = None, seed: Optional[int] = None) -> IndexResult:
    """
    Smallest satisfying index by bisection of the domain.

    From j = 0 and k = n-1 down to 0, the block [j, j + 2^k) is tested with sat_decide at
    per-step failure probability delta_1 = 1 - (1 - delta)^(1/n); a NO moves j past it.
    One confirmation call B(j) closes the search; if it returns 0 there is no witness.

    Returns:
        IndexResult: index None and confirmed False when the confirmation fails.
    """
    config = get_config(config)
    delta = validate_probability(delta)
    generator = as_generator(rng, seed)
    ledger = QueryLedger()
    j = 0
    if B.n > 0:
        step_delta = split_confidence(delta, B.n)
        for k in range(B.n - 1, -1, -1):
            decision = sat_decide(B.restrict(j, k), step_delta, backend, rng=generator, config=config)
            ledger += decision.ledger
            if not decision.answer:
                j += 2 ** k
    confirmed = B(j) == 1
    ledger += QueryLedger(bit_queries=1, verification_queries=1)
    if not confirmed:
        logger.info(f"sat_search({B.label}): B({j}) = 0, no witness")
        return IndexResult(index=None, confirmed=False, delta=delta, ledger=ledger, flags=("no_witness",))
    logger.debug(f"sat_search({B.label}) -> {j}")
    return IndexResult(index=j, confirmed=True, delta=delta, ledger=ledger)
