"""
Exception hierarchy of kj_sle.

Every error raised on purpose by the package derives from SleError. The
subclasses also derive from the matching builtin so callers that only know
ValueError or RuntimeError keep working.
"""


class SleError(Exception):
    """Base class for all kj_sle errors."""


class InputError(SleError, ValueError):
    """Invalid argument, malformed file or violated precondition."""


class CapacityError(SleError, RuntimeError):
    """The requested accuracy is beyond what the selected backend can deliver."""


class ConvergenceError(SleError, RuntimeError):
    """An iterative solver hit its iteration cap on a hard-fault path."""


class VerificationError(SleError):
    """A result disagrees with an independent check."""
