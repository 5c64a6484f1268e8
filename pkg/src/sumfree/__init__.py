"""Sum-free and inverse-closed subsets of finite fields."""

__version__ = "0.1.0"

from .errors import DomainError, FormatError, PreconditionError, SumfreeError, UsageError
from .fields import BinaryFieldCtx, PrimeFieldCtx
from .interval import Interval
from .subsets import FieldSubset, is_inverse_closed, is_sum_free

__all__ = [
    "BinaryFieldCtx", "DomainError", "FieldSubset", "FormatError", "Interval",
    "PreconditionError", "PrimeFieldCtx", "SumfreeError", "UsageError",
    "is_inverse_closed", "is_sum_free",
]
