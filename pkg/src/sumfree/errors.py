"""Exception hierarchy shared by every module."""


class SumfreeError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(SumfreeError, ValueError):
    """Bad arguments: out-of-range residues, malformed encodings, bad budgets."""


class FormatError(UsageError):
    """A set, claim or report file could not be parsed."""


class DomainError(SumfreeError, ValueError):
    """An operation was applied outside its mathematical domain."""


class PreconditionError(DomainError):
    """An input violates a hypothesis the operation relies on (e.g. not sum-free)."""
