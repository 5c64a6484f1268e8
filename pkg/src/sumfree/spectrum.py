"""Fourier analysis of indicator functions over F_p, Kloosterman sums, and
numeric checks of the explicit identities and inequalities satisfied by the
spectrum of sum-free and inverse-closed sets.

Sign convention: the coefficient at r is (1/p) * sum_{a in A} exp(-2 pi i r a / p),
so the coefficient at 0 is the density alpha.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, PreconditionError, UsageError
from .fields import BinaryFieldCtx, PrimeFieldCtx
from .subsets import FieldSubset, is_inverse_closed, is_sum_free

DIRECT_MAX_P = 1 << 14
DIRECT_MAX_WORK = 1 << 24
_CHUNK = 1 << 22


def tolerance(p: int) -> float:
    """Float slack allowed for p-term cancellation sums."""
    return 1e-12 * p


def _require_prime(A: FieldSubset) -> PrimeFieldCtx:
    if A.field.kind != "prime":
        raise DomainError("Fourier coefficients are only defined here for prime fields")
    return A.field


def _roots(p: int) -> np.ndarray:
    k = np.arange(p)
    return np.exp(-2j * np.pi * k / p)


def fourier_coefficient(A: FieldSubset, r: int) -> complex:
    ctx = _require_prime(A)
    r = ctx.check(r % ctx.p)
    phases = (r * A.elements) % ctx.p
    return complex(np.exp(-2j * np.pi * phases / ctx.p).sum() / ctx.p)


def _coefficients_direct(A: FieldSubset) -> np.ndarray:
    p = A.field.p
    w = _roots(p)
    els = A.elements
    out = np.empty(p, dtype=complex)
    step = max(1, _CHUNK // max(1, els.size))
    for start in range(0, p, step):
        r = np.arange(start, min(p, start + step), dtype=np.int64)
        idx = np.outer(r, els) % p
        out[start:start + r.size] = w[idx].sum(axis=1)
    return out / p


def _coefficients_fft(A: FieldSubset) -> np.ndarray:
    return np.fft.fft(A.members.astype(float)) / A.field.p


@dataclass(frozen=True)
class Spectrum:
    """All Fourier coefficients of 1_A plus the delta-ordered half spectrum."""

    p: int
    alpha: float
    size: int
    coefficients: np.ndarray
    ordered: tuple  # ((r_1, delta_1), (r_2, delta_2), ...), delta descending
    theta1: float

    def coefficient(self, r: int) -> complex:
        return complex(self.coefficients[r % self.p])

    @property
    def deltas(self) -> np.ndarray:
        return np.array([d for _, d in self.ordered])

    @property
    def rs(self) -> list[int]:
        return [r for r, _ in self.ordered]

    def delta(self, i: int) -> float:
        """delta_i with 1-based index; 0 past the end."""
        return self.ordered[i - 1][1] if 1 <= i <= len(self.ordered) else 0.0


def full_spectrum(A: FieldSubset, method: str = "auto") -> Spectrum:
    ctx = _require_prime(A)
    p = ctx.p
    if A.size == 0:
        raise DomainError("spectrum of the empty set has no delta ordering")
    if method == "auto":
        direct = p <= DIRECT_MAX_P and p * A.size <= DIRECT_MAX_WORK
        method = "direct" if direct else "fft"
    if method == "direct":
        c = _coefficients_direct(A)
    elif method == "fft":
        c = _coefficients_fft(A)
    else:
        raise UsageError(f"unknown method {method!r}")
    c.setflags(write=False)
    alpha = A.size / p
    half = (p - 1) // 2
    rs = np.arange(1, half + 1)
    deltas = np.abs(c[rs]) / alpha
    # ties (up to float noise) broken by the smaller frequency
    order = sorted(range(half), key=lambda i: (-round(float(deltas[i]), 12), int(rs[i])))
    ordered = tuple((int(rs[i]), float(deltas[i])) for i in order)
    theta1 = float(np.angle(c[ordered[0][0]]) % (2 * math.pi)) if ordered else 0.0
    return Spectrum(p, alpha, A.size, c, ordered, theta1)


# ---------------------------------------------------------------------------
# diagnostics


@dataclass
class Record:
    """One inequality lhs <relation> rhs, evaluated in floating point."""

    name: str
    lhs: float
    rhs: float
    relation: str = "<="
    slack: float = 0.0
    holds: Optional[bool] = None
    tol: float = 0.0
    applicable: bool = True

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        self.slack = self.rhs - self.lhs if self.relation == "<=" else self.lhs - self.rhs
        self.holds = (self.slack >= -self.tol) if self.applicable else None

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class DiagnosticsReport:
    set_descriptor: dict
    records: list[Record] = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return all(r.holds is not False for r in self.records)

    def violations(self) -> list[Record]:
        return [r for r in self.records if r.holds is False]

    def to_json(self) -> dict:
        return {
            "set": self.set_descriptor,
            "params": self.params,
            "all_hold": self.all_hold,
            "records": [r.to_json() for r in self.records],
        }


def check_parseval(S: Spectrum) -> float:
    """|alpha - sum_r |coefficient(r)|^2|."""
    return abs(S.alpha - float(np.sum(np.abs(S.coefficients) ** 2)))


def check_sum_of_cubes(A: FieldSubset, S: Optional[Spectrum] = None) -> float:
    """|alpha^3 + sum_{r != 0} |c(r)|^2 c(r)|, which vanishes for sum-free A."""
    if not is_sum_free(A):
        raise PreconditionError("the sum-of-cubes identity needs a sum-free set")
    if S is None:
        S = full_spectrum(A)
    c = S.coefficients[1:]
    return abs(S.alpha ** 3 + complex(np.sum(np.abs(c) ** 2 * c)))


def check_tail_bound(S: Spectrum, k: int, alpha0: float) -> list[Record]:
    half = (S.p - 1) // 2
    if not 1 <= k < half:
        raise DomainError(f"need 1 <= k < (p-1)/2 = {half}, got k = {k}")
    if not 0 < alpha0 <= S.alpha:
        raise DomainError(f"need 0 < alpha0 <= alpha = {S.alpha}, got {alpha0}")
    tol = tolerance(S.p)
    a = S.alpha
    d = S.deltas
    return [
        Record("tail_delta_k", d[k - 1] ** 2, (1 - a) / (2 * k * a), tol=tol),
        Record("tail_sum", float(np.sum(d[k:] ** 3)),
               k ** -0.5 * ((1 - alpha0) / (2 * alpha0)) ** 1.5, tol=tol),
    ]


def check_sumfree_alpha_bounds(S: Spectrum) -> list[Record]:
    """Upper bounds on alpha from the two largest normalised coefficients.

    The caller is responsible for the set being sum-free.  The second bound is
    only asserted when its denominator is positive.
    """
    tol = tolerance(S.p)
    d1, d2 = S.delta(1), S.delta(2)
    denom = 1 + d2 + 2 * d1 ** 2 * d2 - 2 * d1 ** 3
    second_ok = denom > 0
    return [
        Record("cor34_first", S.alpha, d1 / (1 + d1), tol=tol),
        Record("cor34_second", S.alpha, d2 / denom if second_ok else math.inf,
               tol=tol, applicable=second_ok),
    ]


def check_cube_sum(S: Spectrum) -> Record:
    """delta_1^3 |cos theta_1| + sum_{i >= 2} delta_i^3 >= 1/2 for sum-free sets."""
    d = S.deltas
    lhs = d[0] ** 3 * abs(math.cos(S.theta1)) + float(np.sum(d[1:] ** 3))
    return Record("cor33_full", lhs, 0.5, relation=">=", tol=tolerance(S.p))


def moreover_shifts(S: Spectrum, k: int) -> list[int]:
    """(r_1, ..., r_k, -r_1, ..., -r_k)."""
    rs = S.rs[:k]
    return rs + [(-r) % S.p for r in rs]


def check_self_inverse_bound(A: FieldSubset, s: Sequence[int],
                             S: Optional[Spectrum] = None) -> Record:
    """alpha (1 + (m+1)(1 + 2 sqrt p)/p) >= alpha^2 (1 + 2 sum lambda_i^2)."""
    ctx = _require_prime(A)
    p = ctx.p
    s = [int(x) % p for x in s]
    if any(x == 0 for x in s) or len(set(s)) != len(s):
        raise DomainError("shifts must be distinct and nonzero")
    if not is_inverse_closed(A):
        raise PreconditionError("the self-inverse bound needs an inverse-closed set")
    if A.size == 0:
        raise DomainError("empty set")
    if S is None:
        S = full_spectrum(A)
    a = S.alpha
    lam2 = sum(abs(S.coefficient(x)) ** 2 for x in s) / a ** 2
    m = len(s)
    lhs = a * (1 + (m + 1) * (1 + 2 * math.sqrt(p)) / p)
    rhs = a * a * (1 + 2 * lam2)
    return Record("prop37", lhs, rhs, relation=">=", tol=tolerance(p))


def check_doubling_bounds(S: Spectrum, r: int) -> list[Record]:
    """Lower bounds on the coefficient at 2r in terms of the one at r."""
    r %= S.p
    if r == 0:
        raise DomainError("r must be nonzero")
    c = S.coefficient(r)
    c2 = S.coefficient(2 * r)
    a = S.alpha
    delta = abs(c) / a
    cos_t = c.real / abs(c) if abs(c) > 0 else 1.0
    tol = tolerance(S.p)
    return [
        Record("doubling_re", c2.real, a * (2 * delta ** 2 * cos_t ** 2 - 1), relation=">=", tol=tol),
        Record("doubling_abs", abs(c2), (2 * delta ** 2 - 1) * a, relation=">=", tol=tol),
    ]


def diagnose(A: FieldSubset, ks: Sequence[int] = (), m: Optional[int] = None,
             rs: Sequence[int] = (), alpha0: Optional[float] = None) -> DiagnosticsReport:
    """Run every applicable check on A and collect the records."""
    S = full_spectrum(A)
    tol = tolerance(S.p)
    sum_free = is_sum_free(A)
    inv_closed = is_inverse_closed(A)
    report = DiagnosticsReport(
        {"kind": "prime", "p": S.p, "size": A.size},
        params={"alpha": S.alpha, "sum_free": sum_free, "inverse_closed": inv_closed,
                "r1": S.rs[0] if S.rs else None, "delta1": S.delta(1), "theta1": S.theta1,
                "k": list(ks), "m": m, "r": list(rs)},
    )
    report.records.append(Record("parseval", check_parseval(S), tol))
    if sum_free:
        report.records.append(Record("sum_of_cubes", check_sum_of_cubes(A, S), tol))
        report.records.extend(check_sumfree_alpha_bounds(S))
        report.records.append(check_cube_sum(S))
    a0 = S.alpha if alpha0 is None else alpha0
    report.params["alpha0"] = a0
    for k in ks:
        report.records.extend(check_tail_bound(S, k, a0))
    if m is not None:
        if not inv_closed:
            raise PreconditionError("the self-inverse bound needs an inverse-closed set")
        interleaved = [x for r in S.rs for x in (r, (-r) % S.p)]
        if m > len(interleaved):
            raise DomainError(f"m = {m} exceeds p - 1 = {len(interleaved)}")
        s = interleaved[:m]
        report.params["s"] = s
        report.params["lambda"] = [abs(S.coefficient(x)) / S.alpha for x in s]
        report.records.append(check_self_inverse_bound(A, s, S))
    for r in rs:
        report.records.extend(check_doubling_bounds(S, r))
    return report


# ---------------------------------------------------------------------------
# Kloosterman sums


def kloosterman_prime(ctx: PrimeFieldCtx, a: int, b: int) -> float:
    """sum_{x != 0} exp(2 pi i (a x + b / x) / p), which is real."""
    p = ctx.p
    if (a * b) % p == 0:
        raise DomainError("Kloosterman sum needs ab != 0 mod p")
    x = np.arange(1, p, dtype=np.int64)
    phase = (a % p * x + b % p * ctx.inverse_table[x]) % p
    total = complex(np.exp(2j * np.pi * phase / p).sum())
    assert abs(total.imag) < 1e-9 * p
    value = total.real
    assert abs(value) <= 2 * math.sqrt(p) + tolerance(p), (a, b, value)
    return value


def kloosterman_prime_matrix(ctx: PrimeFieldCtx) -> np.ndarray:
    """K[a, b] for all a, b in F_p (row/column 0 included), as one matrix product."""
    p = ctx.p
    x = np.arange(p)
    w = np.exp(2j * np.pi * np.arange(p) / p)
    left = w[np.outer(x, x) % p]           # e(a x / p)
    right = w[np.outer(ctx.inverse_table, x) % p]  # e(b x^{-1} / p)
    left[:, 0] = 0                         # drop x = 0
    return left @ right


def kloosterman_char2(ctx: BinaryFieldCtx, a: int) -> int:
    """sum_{x != 0} (-1)^Tr(x + a/x), exact."""
    a = ctx.check(a)
    if a == 0:
        raise DomainError("Kloosterman sum needs a != 0")
    total = 0
    for x in range(1, ctx.order):
        y = x ^ ctx.mul(a, ctx.inv(x))
        total += -1 if ctx.trace(y) else 1
    assert total * total <= 4 * ctx.order, (a, total)
    return total


def kloosterman_char2_all(ctx: BinaryFieldCtx) -> np.ndarray:
    """Sums for every a (entry 0 unused), via log tables and the trace table."""
    q = ctx.order
    q1 = q - 1
    log, exp = ctx.log_table, ctx.exp_table
    tr = ctx.trace_table.astype(np.int64)
    xs = np.arange(1, q)
    inv_log = (q1 - log[xs]) % q1
    out = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        prod = exp[(log[a] + inv_log) % q1]
        signs = 1 - 2 * tr[xs ^ prod]
        out[a] = int(signs.sum())
    return out
