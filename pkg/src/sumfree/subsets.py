"""Subsets of finite fields, sum-free / inverse-closed predicates and the two
explicit constructions (trace set in characteristic 2, middle-third interval
in F_p).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DomainError, FormatError, UsageError
from .fields import BinaryFieldCtx, FieldCtx, PrimeFieldCtx, field_from_descriptor

# Above these sizes the sum-free test switches from pairwise sums to a transform.
CONVOLUTION_THRESHOLD = 1 << 16
WALSH_THRESHOLD = 2048


@dataclass(frozen=True, eq=False)
class FieldSubset:
    """An immutable subset of a finite field, stored as a boolean membership array."""

    field: FieldCtx
    members: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.members, dtype=bool)
        if m.shape != (self.field.order,):
            raise UsageError(f"membership array must have length {self.field.order}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "members", m)

    @classmethod
    def from_elements(cls, field: FieldCtx, elements: Iterable[int]) -> "FieldSubset":
        m = np.zeros(field.order, dtype=bool)
        for x in elements:
            m[field.check(int(x))] = True
        return cls(field, m)

    @classmethod
    def empty(cls, field: FieldCtx) -> "FieldSubset":
        return cls(field, np.zeros(field.order, dtype=bool))

    @cached_property
    def elements(self) -> np.ndarray:
        e = np.flatnonzero(self.members).astype(np.int64)
        e.setflags(write=False)
        return e

    @cached_property
    def size(self) -> int:
        return int(np.count_nonzero(self.members))

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.size, self.field.order)

    @property
    def density(self) -> float:
        return self.size / self.field.order

    def __len__(self):
        return self.size

    def __iter__(self):
        return (int(x) for x in self.elements)

    def __contains__(self, x) -> bool:
        return 0 <= x < self.field.order and bool(self.members[x])

    def __eq__(self, other):
        if not isinstance(other, FieldSubset):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.members, other.members)

    def __hash__(self):
        return hash((self.field, self.members.tobytes()))

    def __repr__(self):
        shown = list(self)[:12]
        more = ", ..." if self.size > 12 else ""
        return f"FieldSubset({self.field.descriptor()}, {{{', '.join(map(str, shown))}{more}}})"

    def inverse(self) -> "FieldSubset":
        """A^{-1} under the 0^{-1} = 0 convention."""
        inv = _inverse_array(self.field, self.elements)
        m = np.zeros(self.field.order, dtype=bool)
        m[inv] = True
        return FieldSubset(self.field, m)

    def intersection(self, other: "FieldSubset") -> "FieldSubset":
        return FieldSubset(self.field, self.members & other.members)


def _inverse_array(field: FieldCtx, xs: np.ndarray) -> np.ndarray:
    try:
        return field.inverse_table[xs]
    except UsageError:
        return np.array([field.inv(int(x)) for x in xs], dtype=np.int64)


def is_sum_free(A: FieldSubset, method: str = "auto") -> bool:
    """True iff no a, b, c in A (a = b allowed) satisfy a + b = c."""
    if A.size == 0:
        return True
    if A.members[0]:
        return False
    field = A.field
    if method == "auto":
        if field.kind == "prime" and field.order > CONVOLUTION_THRESHOLD:
            method = "transform"
        elif field.kind == "binary" and A.size > WALSH_THRESHOLD:
            method = "transform"
        else:
            method = "pairs"
    if method == "pairs":
        els = A.elements
        members = A.members
        for a in els:
            if members[field.add_vec(int(a), els)].any():
                return False
        return True
    if method == "transform":
        counts = _sum_counts(A)
        return not (counts[A.members] > 0.5).any()
    raise UsageError(f"unknown method {method!r}")


def _sum_counts(A: FieldSubset) -> np.ndarray:
    """Number of ordered pairs (a, b) in A x A with a + b = x, for every x."""
    f = A.members.astype(float)
    if A.field.kind == "prime":
        F = np.fft.rfft(f)
        return np.fft.irfft(F * F, n=A.field.order)
    h = _walsh_hadamard(f)
    return _walsh_hadamard(h * h) / A.field.order


def _walsh_hadamard(v: np.ndarray) -> np.ndarray:
    v = v.astype(float).copy()
    n = v.shape[0]
    h = 1
    while h < n:
        v = v.reshape(-1, 2, h)
        a = v[:, 0, :] + v[:, 1, :]
        b = v[:, 0, :] - v[:, 1, :]
        v = np.stack([a, b], axis=1).reshape(n)
        h *= 2
    return v


def is_inverse_closed(A: FieldSubset) -> bool:
    """True iff 0 is not in A and a^{-1} is in A for every a in A."""
    if A.members[0]:
        return False
    if A.size == 0:
        return True
    return bool(A.members[_inverse_array(A.field, A.elements)].all())


def inverse_ratio(A: FieldSubset) -> Fraction:
    """|A n A^{-1}| / |A|."""
    if A.size == 0:
        raise DomainError("inverse ratio is undefined for the empty set")
    if A.members[0]:
        raise DomainError("inverse ratio requires 0 not in A")
    inv = _inverse_array(A.field, A.elements)
    return Fraction(int(np.count_nonzero(A.members[inv])), A.size)


def construct_interval_intersection(ctx: PrimeFieldCtx) -> FieldSubset:
    """I n I^{-1} with I = {x : p/3 < x < 2p/3}."""
    p = ctx.p
    if p < 5:
        raise UsageError("interval construction needs p >= 5")
    x = np.arange(p)
    interval = (3 * x > p) & (3 * x < 2 * p)
    inv = ctx.inverse_table if p < (1 << 20) else None
    if inv is None:
        inv = np.array([pow(int(v), -1, p) if v else 0 for v in x], dtype=np.int64)
    A = FieldSubset(ctx, interval & interval[inv])
    assert is_sum_free(A) and is_inverse_closed(A)
    return A


def construct_char2(ctx: BinaryFieldCtx, check: bool = True) -> FieldSubset:
    """X n X^{-1} where X = {x : Tr(x) = 1}."""
    if ctx.n < 2:
        raise UsageError("characteristic-2 construction needs n >= 2")
    tr = ctx.trace_table.astype(bool)
    inv = ctx.inverse_table
    A = FieldSubset(ctx, tr & tr[inv])
    if check:
        assert is_sum_free(A) and is_inverse_closed(A)
    return A


def char2_density_bound(n: int) -> float:
    """Largest possible |alpha - 1/4| for the trace construction: (1 + 2 sqrt q) / (4q)."""
    q = 1 << n
    return (1 + 2 * math.sqrt(q)) / (4 * q)


# ---------------------------------------------------------------------------
# set files


def set_to_json(A: FieldSubset) -> dict:
    field = A.field
    if field.kind == "prime":
        return {"kind": "prime", "p": field.p, "elements": [int(x) for x in A]}
    return {
        "kind": "binary",
        "n": field.n,
        "modulus": hex(field.modulus),
        "elements": [hex(int(x)) for x in A],
    }


def set_from_json(d: dict) -> FieldSubset:
    if not isinstance(d, dict) or "elements" not in d:
        raise FormatError("set file must be an object with an 'elements' list")
    try:
        field = field_from_descriptor(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad field description: {exc}") from exc
    raw = d["elements"]
    if not isinstance(raw, list):
        raise FormatError("'elements' must be a list")
    els = []
    for e in raw:
        if field.kind == "binary":
            if not isinstance(e, str):
                raise FormatError(f"binary-field elements must be hex strings, got {e!r}")
            try:
                e = int(e, 16)
            except ValueError as exc:
                raise FormatError(f"bad hex element {e!r}") from exc
        elif not isinstance(e, int) or isinstance(e, bool):
            raise FormatError(f"prime-field elements must be integers, got {e!r}")
        if not 0 <= e < field.order:
            raise FormatError(f"element {e} out of range for a field of order {field.order}")
        els.append(e)
    if any(b <= a for a, b in zip(els, els[1:])):
        raise FormatError("elements must be strictly increasing (no duplicates)")
    return FieldSubset.from_elements(field, els)


def load_set(path) -> FieldSubset:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return set_from_json(d)


def dump_set(A: FieldSubset, path) -> None:
    Path(path).write_text(json.dumps(set_to_json(A)) + "\n")
