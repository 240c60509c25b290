"""
Command line front end.

    python -m kj_sle <task> [options]

Exit codes: 0 success, 2 invalid input, 3 capacity or convergence failure,
4 verification mismatch or unconfirmed result.
"""
import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from kj_logger import get_logger

from .classes.boolean_oracle import BooleanOracle
from .classes.bounded_vector import BoundedVector
from .classes.query_ledger import QueryLedger
from .classes.tridiagonal_system import build_matrix
from .core_config import SleConfig
from .errors import CapacityError, ConvergenceError, InputError, VerificationError
from .reductions.boolmean import boolean_mean
from .reductions.grover import grover_find
from .reductions.integrate import integrate_weighted
from .reductions.minimize import min_index, min_value, parse_vector_text
from .reductions.sat import cnf_oracle, read_dimacs_file, sat_decide, sat_search
from .reductions.tsp import (estimate_distance_bound, read_matrix_file, tour_length, tsp_decide,
                             tsp_min_length, tsp_optimal_tour)
from .solvers.eigen import smallest_eigenvalue_classical
from .solvers.qpe import estimate_lambda
from .utils.expressions import parse_integrand, parse_potential
from .utils.path_utils import read_text_file, write_text_file
from .verify.brute_force import brute_min, brute_sat, brute_tsp
from .verify.reference import high_resolution_lambda, weighted_integral

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAPACITY = 3
EXIT_VERIFICATION = 4


@dataclass
class Outcome:
    result: Dict[str, Any]
    summary: str
    ledger: QueryLedger = field(default_factory=QueryLedger)
    eta: Optional[float] = None
    exit_code: int = EXIT_OK


@dataclass
class Context:
    args: argparse.Namespace
    config: SleConfig
    inputs: Dict[str, Any] = field(default_factory=dict)

    @property
    def backend(self) -> str:
        return self.args.backend or self.config.backend

    def run_kwargs(self) -> Dict[str, Any]:
        return {"backend": self.backend, "config": self.config, "seed": self.args.seed}

    def file_input(self, name: str, path: str) -> str:
        text = read_text_file(path)
        self.inputs[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return text


# ---- input sources ----

def _oracle(ctx: Context) -> BooleanOracle:
    args = ctx.args
    if getattr(args, "cnf", None):
        ctx.file_input("cnf", args.cnf)
        return cnf_oracle(read_dimacs_file(args.cnf, strict=ctx.config.dimacs_strict))
    if getattr(args, "bits", None):
        if not args.bits or set(args.bits) - set("01"):
            raise InputError(f"--bits must be a string of 0s and 1s, got '{args.bits}'")
        ctx.inputs["bits"] = args.bits
        return BooleanOracle.from_bits([int(c) for c in args.bits], label="bits")
    if getattr(args, "marked", None) is not None:
        if args.n is None:
            raise InputError("--marked needs --n")
        ctx.inputs.update(marked=args.marked, n=args.n)
        return BooleanOracle.indicator(args.n, [args.marked])
    raise InputError("Give the Boolean function with --cnf, --bits or --marked/--n")


def _vector(ctx: Context) -> BoundedVector:
    args = ctx.args
    if args.vector:
        values = parse_vector_text(ctx.file_input("vector", args.vector))
    elif args.values:
        values = [float(v) for v in args.values]
        ctx.inputs["values"] = values
    else:
        raise InputError("Give the vector with --vector or --values")
    ctx.inputs["bound"] = args.bound
    return BoundedVector.from_values(values, bound_M=args.bound)


def _matrix(ctx: Context):
    ctx.file_input("matrix", ctx.args.matrix)
    return read_matrix_file(ctx.args.matrix)


# ---- tasks ----

def run_eigen(ctx: Context) -> Outcome:
    if ctx.args.eta is None:
        raise InputError("eigen needs --eta")
    ctx.inputs["q"] = ctx.args.q
    q = parse_potential(ctx.args.q)
    estimate = estimate_lambda(q, ctx.args.eta, ctx.args.delta, **ctx.run_kwargs())
    plan = estimate.plan
    return Outcome(result={"value": estimate.value, "excess": estimate.excess, "plan": plan.to_dict()},
                   summary=f"lambda({q.label}) ~ {estimate.value:.12g} (k={plan.k}, b={plan.b}, r={plan.r})",
                   ledger=estimate.ledger, eta=estimate.eta)


def run_integrate(ctx: Context) -> Outcome:
    if ctx.args.epsilon is None:
        raise InputError("integrate needs --epsilon")
    ctx.inputs["f"] = ctx.args.f
    f = parse_integrand(ctx.args.f)
    estimate = integrate_weighted(f, ctx.args.epsilon, ctx.args.delta, **ctx.run_kwargs())
    return Outcome(result={"value": estimate.value, "c": estimate.c, "flags": list(estimate.flags)},
                   summary=f"I({f.label}) ~ {estimate.value:.12g}", ledger=estimate.ledger, eta=estimate.eta)


def run_mean(ctx: Context) -> Outcome:
    B = _oracle(ctx)
    eps = ctx.args.epsilon if ctx.args.epsilon is not None else 1.0 / (3 * B.N)
    estimate = boolean_mean(B, eps, ctx.args.delta, **ctx.run_kwargs())
    return Outcome(result={"value": estimate.value, "rounded": estimate.rounded, "count": estimate.rounded_count},
                   summary=f"S_N ~ {estimate.value:.9g}, rounded {estimate.rounded_count}/{B.N}",
                   ledger=estimate.ledger, eta=estimate.eta)


def run_sat(ctx: Context) -> Outcome:
    B = _oracle(ctx)
    if ctx.args.mode == "decide":
        decision = sat_decide(B, ctx.args.delta, **ctx.run_kwargs())
        return Outcome(result={"answer": decision.verdict}, summary=decision.verdict, ledger=decision.ledger)
    found = sat_search(B, ctx.args.delta, **ctx.run_kwargs())
    summary = f"smallest witness {found.index}" if found.confirmed else "no witness"
    return Outcome(result={"index": found.index, "confirmed": found.confirmed, "flags": list(found.flags)},
                   summary=summary, ledger=found.ledger)


def run_grover(ctx: Context) -> Outcome:
    B = _oracle(ctx)
    found = grover_find(B, ctx.args.delta, **ctx.run_kwargs())
    summary = f"witness {found.index}" if found.confirmed else "promise violated or unlucky run"
    return Outcome(result={"index": found.index, "confirmed": found.confirmed, "flags": list(found.flags)},
                   summary=summary, ledger=found.ledger,
                   exit_code=EXIT_OK if found.confirmed else EXIT_VERIFICATION)


def run_min(ctx: Context) -> Outcome:
    x = _vector(ctx)
    eps = ctx.args.epsilon if ctx.args.epsilon is not None else 1 / 3
    if ctx.args.mode == "value":
        estimate = min_value(x, eps, ctx.args.delta, **ctx.run_kwargs())
        return Outcome(result={"value": estimate.value, "steps": len(estimate.trace)},
                       summary=f"min ~ {estimate.value:.9g}", ledger=estimate.ledger, eta=eps)
    found = min_index(x, eps, ctx.args.delta, **ctx.run_kwargs())
    return Outcome(result=found.to_dict(), summary=f"index {found.index} (x_j = {found.entry})",
                   ledger=found.ledger, eta=eps, exit_code=EXIT_OK if found.confirmed else EXIT_VERIFICATION)


def run_tsp(ctx: Context) -> Outcome:
    D = _matrix(ctx)
    mode = ctx.args.mode
    if mode == "decide":
        if ctx.args.bound is None:
            raise InputError("tsp decide needs --bound")
        ctx.inputs["bound"] = ctx.args.bound
        decision = tsp_decide(D, ctx.args.bound, ctx.args.delta, **ctx.run_kwargs())
        return Outcome(result={"answer": decision.verdict}, summary=decision.verdict, ledger=decision.ledger)
    if mode == "bound":
        bound = estimate_distance_bound(D, ctx.args.delta, **ctx.run_kwargs())
        return Outcome(result={"bound_M": bound.bound_M, "steps": bound.steps}, summary=f"M = {bound.bound_M}",
                       ledger=bound.ledger)
    solve = tsp_min_length if mode == "length" else tsp_optimal_tour
    tour = solve(D, ctx.args.delta, **ctx.run_kwargs())
    summary = f"length {tour.length}" if mode == "length" else f"tour {list(tour.tour)} of length {tour.length}"
    return Outcome(result=tour.to_dict(), summary=summary, ledger=tour.ledger)


def _verified(result: Dict[str, Any], match: bool, ledger: QueryLedger, eta: Optional[float] = None) -> Outcome:
    result = dict(result, match=match)
    return Outcome(result=result, summary="match" if match else f"MISMATCH {result}", ledger=ledger, eta=eta,
                   exit_code=EXIT_OK if match else EXIT_VERIFICATION)


def run_verify(ctx: Context) -> Outcome:
    args = ctx.args
    kind = args.kind
    if kind == "sat":
        B = _oracle(ctx)
        satisfiable, witness = brute_sat(B, B.n)
        decision = sat_decide(B, args.delta, **ctx.run_kwargs())
        ledger = decision.ledger
        observed = {"answer": decision.verdict}
        match = decision.answer == satisfiable
        if satisfiable:
            found = sat_search(B, args.delta, **ctx.run_kwargs())
            ledger += found.ledger
            observed["index"] = found.index
            match = match and found.index == witness
        return _verified({"expected": {"answer": "YES" if satisfiable else "NO", "index": witness},
                          "observed": observed}, match, ledger)
    if kind == "min":
        x = _vector(ctx)
        eps = args.epsilon if args.epsilon is not None else 1 / 3
        minimum, _ = brute_min(x.entries)
        value = min_value(x, eps, args.delta, **ctx.run_kwargs())
        found = min_index(x, eps, args.delta, **ctx.run_kwargs())
        match = abs(value.value - minimum) <= eps and found.confirmed and found.entry <= minimum + eps
        return _verified({"expected": minimum, "observed": {"value": value.value, "index": found.index,
                                                            "entry": found.entry}},
                         match, value.ledger + found.ledger, eta=eps)
    if kind == "tsp":
        D = _matrix(ctx)
        length, tour = brute_tsp(D.d)
        solved = tsp_optimal_tour(D, args.delta, **ctx.run_kwargs())
        rescored = tour_length(D, solved.tour)
        return _verified({"expected": {"length": length, "tour": list(tour)},
                          "observed": {"length": solved.length, "tour": list(solved.tour), "rescored": rescored}},
                         solved.length == length and rescored == length, solved.ledger)
    if kind == "integrate":
        if args.epsilon is None:
            raise InputError("verify integrate needs --epsilon")
        ctx.inputs["f"] = args.f
        f = parse_integrand(args.f)
        expected = weighted_integral(f, breakpoints=f.breakpoints)
        estimate = integrate_weighted(f, args.epsilon, args.delta, **ctx.run_kwargs())
        return _verified({"expected": expected, "observed": estimate.value},
                         abs(estimate.value - expected) <= args.epsilon, estimate.ledger, eta=args.epsilon)
    ctx.inputs.update(q=args.q, k=args.k)
    q = parse_potential(args.q)
    expected = high_resolution_lambda(q, args.k)
    observed = smallest_eigenvalue_classical(build_matrix(q, args.k, check_points=ctx.config.grid_check_points))
    return _verified({"expected": expected, "observed": observed},
                     abs(observed - expected) <= 1e-9 * abs(expected), QueryLedger(classical_ops=1))


TASKS: Dict[str, Callable[[Context], Outcome]] = {
    "eigen": run_eigen, "integrate": run_integrate, "mean": run_mean, "sat": run_sat, "grover": run_grover,
    "min": run_min, "tsp": run_tsp, "verify": run_verify,
}


# ---- parser ----

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--delta", type=float, default=0.05, help="failure probability")
    common.add_argument("--epsilon", type=float, help="target accuracy")
    common.add_argument("--eta", type=float, help="eigenvalue accuracy")
    common.add_argument("--backend", choices=SleConfig.backends, help="eigenvalue backend")
    common.add_argument("--seed", type=int, help="seed of the quantum backends")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--strict-dimacs", action=argparse.BooleanOptionalAction, default=None,
                        help="require the DIMACS clause count to match the header")
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--threads", type=int, help="threads for the phase estimation repetitions")
    common.add_argument("--out", help="also write the JSON report to this file")
    return common


def _oracle_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cnf", help="DIMACS CNF file")
    parser.add_argument("--bits", help="truth table as a 0/1 string of length 2^n")
    parser.add_argument("--marked", type=int, help="single satisfying index")
    parser.add_argument("--n", type=int, help="number of variables for --marked")


def _vector_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--vector", help="file with one value per line")
    parser.add_argument("--values", nargs="+", help="inline values")
    parser.add_argument("--bound", type=float, help="bound M on |x_j|, default max |x_j|")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="kj_sle", description="Sturm-Liouville eigenvalue reductions")
    tasks = parser.add_subparsers(dest="task", required=True)

    eigen = tasks.add_parser("eigen", parents=[common], help="smallest eigenvalue of -u'' + q u")
    eigen.add_argument("--q", required=True, help="potential expression")

    integrate = tasks.add_parser("integrate", parents=[common], help="weighted integral of f")
    integrate.add_argument("--f", required=True, help="integrand expression")

    mean = tasks.add_parser("mean", parents=[common], help="Boolean mean")
    _oracle_options(mean)

    sat = tasks.add_parser("sat", help="satisfiability").add_subparsers(dest="mode", required=True)
    for mode in ("decide", "search"):
        _oracle_options(sat.add_parser(mode, parents=[common]))

    grover = tasks.add_parser("grover", parents=[common], help="single-witness search")
    _oracle_options(grover)

    minimum = tasks.add_parser("min", help="minimum of a vector").add_subparsers(dest="mode", required=True)
    for mode in ("value", "index"):
        _vector_options(minimum.add_parser(mode, parents=[common]))

    tsp = tasks.add_parser("tsp", help="traveling salesman").add_subparsers(dest="mode", required=True)
    for mode in ("decide", "length", "tour", "bound"):
        sub = tsp.add_parser(mode, parents=[common])
        sub.add_argument("--matrix", required=True, help="distance matrix file (text or JSON)")
        if mode == "decide":
            sub.add_argument("--bound", type=int, help="tour length bound B")

    verify = tasks.add_parser("verify", help="compare against brute force").add_subparsers(dest="kind",
                                                                                          required=True)
    _oracle_options(verify.add_parser("sat", parents=[common]))
    _vector_options(verify.add_parser("min", parents=[common]))
    verify.add_parser("tsp", parents=[common]).add_argument("--matrix", required=True)
    verify.add_parser("integrate", parents=[common]).add_argument("--f", required=True)
    eigen_check = verify.add_parser("eigen", parents=[common])
    eigen_check.add_argument("--q", required=True)
    eigen_check.add_argument("--k", type=int, default=1023)
    return parser


def _load_config(args: argparse.Namespace) -> SleConfig:
    config = SleConfig.from_file(args.config) if args.config else SleConfig()
    changes = {}
    if args.threads is not None:
        changes["threads"] = args.threads
    if args.strict_dimacs is not None:
        changes["dimacs_strict"] = args.strict_dimacs
    return config.replace(**changes) if changes else config


def _task_name(args: argparse.Namespace) -> str:
    sub = getattr(args, "mode", None) or getattr(args, "kind", None)
    return f"{args.task} {sub}" if sub else args.task


def build_report(ctx: Context, outcome: Outcome, wall_time: float) -> Dict[str, Any]:
    inputs = dict(ctx.inputs, task=_task_name(ctx.args), epsilon=ctx.args.epsilon, eta=ctx.args.eta)
    digest = hashlib.sha256(json.dumps(inputs, sort_keys=True, default=str).encode("utf-8")).hexdigest()
    return {
        "task": _task_name(ctx.args),
        "inputs_digest": digest,
        "result": outcome.result,
        "eta": outcome.eta,
        "delta": ctx.args.delta,
        "backend": ctx.backend,
        "ledger": outcome.ledger.to_dict(),
        "seed": ctx.args.seed,
        "wall_time": wall_time,
    }


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parses `argv`, runs the task and prints a summary or a JSON report.

    Returns:
        int: The exit code.
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code not in (0, None) else EXIT_OK

    started = time.perf_counter()
    try:
        ctx = Context(args=args, config=_load_config(args))
        outcome = TASKS[args.task](ctx)
    except InputError as e:
        logger.error(f"Invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (CapacityError, ConvergenceError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except VerificationError as e:
        logger.error(f"Verification failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VERIFICATION

    report = build_report(ctx, outcome, time.perf_counter() - started)
    text = json.dumps(report, sort_keys=True, indent=2, default=_json_default)
    if args.out:
        write_text_file(args.out, text + "\n")
    print(text if args.json else outcome.summary)
    return outcome.exit_code


def _json_default(value: Any) -> Any:
    if hasattr(value, "item"):
        return value.item()
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(dispatch(argv))
