"""
Textual sources for potentials and integrands used by the command line.

    const:<v>            q(x) = v
    linear:<a>,<b>       q(x) = a + b x
    sine:<amp>,<freq>    q(x) = 1/2 + amp sin(2 pi freq x);  f(x) = amp sin(2 pi freq x)
    file:<path>          two columns x, value; cubic spline through the samples
"""
from typing import List, Tuple

import numpy as np

from kj_logger import get_logger

from ..classes.potential import Potential, SmoothIntegrand
from ..errors import InputError
from .path_utils import read_text_file

logger = get_logger(__name__)


def _split(expression: str) -> Tuple[str, str]:
    kind, sep, argument = expression.partition(":")
    if not sep or not argument:
        raise InputError(f"Expression '{expression}' must look like <kind>:<arguments>")
    return kind.strip().lower(), argument.strip()


def _numbers(argument: str, count: int, expression: str) -> List[float]:
    try:
        values = [float(token) for token in argument.split(",")]
    except ValueError:
        raise InputError(f"Expression '{expression}' has non-numeric arguments") from None
    if len(values) != count:
        raise InputError(f"Expression '{expression}' needs {count} argument(s), got {len(values)}")
    return values


def read_samples(path: str) -> Tuple[np.ndarray, np.ndarray]:
    """Reads 'x value' pairs, one per line; '#' starts a comment line."""
    rows = []
    for number, raw in enumerate(read_text_file(path).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.replace(",", " ").split()
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except (ValueError, IndexError):
            raise InputError(f"{path}, line {number}: expected two numbers, got '{line}'") from None
    samples = np.array(rows, dtype=float).reshape(-1, 2)
    return samples[:, 0], samples[:, 1]


def parse_potential(expression: str) -> Potential:
    """
    Builds a Potential from const, linear, sine or file expressions.

    Raises:
        InputError: On unknown kinds or malformed arguments.
    """
    kind, argument = _split(expression)
    if kind == "const":
        return Potential.constant(*_numbers(argument, 1, expression))
    if kind == "linear":
        return Potential.linear(*_numbers(argument, 2, expression))
    if kind == "sine":
        return Potential.sine(*_numbers(argument, 2, expression))
    if kind == "file":
        xs, ys = read_samples(argument)
        return Potential.tabulated(xs, ys, label=f"file:{argument}")
    raise InputError(f"Unknown potential kind '{kind}' in '{expression}'")


def parse_integrand(expression: str) -> SmoothIntegrand:
    """
    Builds a SmoothIntegrand; M bounds the function and its first two derivatives.

    Raises:
        InputError: On unknown kinds or malformed arguments.
    """
    kind, argument = _split(expression)
    if kind == "const":
        value, = _numbers(argument, 1, expression)
        return SmoothIntegrand(lambda x: np.full_like(x, value), abs(value) or 1.0, label=expression)
    if kind == "linear":
        a, b = _numbers(argument, 2, expression)
        bound = max(abs(a), abs(a + b), abs(b)) or 1.0
        return SmoothIntegrand(lambda x: a + b * x, bound, label=expression)
    if kind == "sine":
        amplitude, frequency = _numbers(argument, 2, expression)
        omega = 2 * np.pi * frequency
        bound = abs(amplitude) * max(1.0, abs(omega), omega ** 2) or 1.0
        width = 1.0 / (2 * abs(frequency)) if frequency else None
        return SmoothIntegrand(lambda x: amplitude * np.sin(omega * x), bound, label=expression,
                               feature_width=width)
    if kind == "file":
        table = Potential.tabulated(*read_samples(argument), label=f"file:{argument}")
        return SmoothIntegrand(table.eval, max(max(table.sup_bounds), 1e-12), label=table.label,
                               feature_width=table.feature_width)
    raise InputError(f"Unknown integrand kind '{kind}' in '{expression}'")
