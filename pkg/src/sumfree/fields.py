"""Exact arithmetic in prime fields F_p and binary fields GF(2^n).

Field elements are plain ``int`` values in both representations: residues
``0..p-1`` for F_p, and polynomial bitmasks of degree < n for GF(2^n).  The
context objects carry all structure and are immutable, so they can be shared
freely between workers.  Zero is mapped to zero by every inverse routine.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from sympy import factorint, isprime

from .errors import DomainError, UsageError

# Lexicographically smallest irreducible polynomial of each degree over F_2.
DEFAULT_MODULI = {
    1: 0x2, 2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x83, 8: 0x11B,
    9: 0x203, 10: 0x409, 11: 0x805, 12: 0x1009, 13: 0x201B, 14: 0x4021,
    15: 0x8003, 16: 0x1002B, 17: 0x20009, 18: 0x40009, 19: 0x80027,
    20: 0x100009, 21: 0x200005, 22: 0x400003, 23: 0x800021, 24: 0x100001B,
}

INVERSE_TABLE_LIMIT = 1 << 20
LOG_TABLE_MAX_DEGREE = 20


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PrimeFieldCtx:
    """The field F_p for an odd prime p."""

    p: int

    kind = "prime"

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool):
            raise UsageError(f"modulus must be an integer, got {self.p!r}")
        if self.p < 3 or not isprime(int(self.p)):
            raise UsageError(f"p = {self.p} is not an odd prime")
        object.__setattr__(self, "p", int(self.p))

    @property
    def order(self) -> int:
        return self.p

    def check(self, x: int) -> int:
        if not 0 <= x < self.p:
            raise UsageError(f"{x} is not a residue modulo {self.p}")
        return int(x)

    def add(self, x: int, y: int) -> int:
        return (x + y) % self.p

    def neg(self, x: int) -> int:
        return -x % self.p

    def mul(self, x: int, y: int) -> int:
        return x * y % self.p

    def add_vec(self, a: int, xs: np.ndarray) -> np.ndarray:
        return (xs + a) % self.p

    def inv(self, x: int) -> int:
        return fp_inverse(self, x)

    @cached_property
    def inverse_table(self) -> np.ndarray:
        """Inverses of 0..p-1 (entry 0 is 0), via inv(i) = -(p // i) * inv(p mod i)."""
        p = self.p
        inv = [0] * p
        if p > 1:
            inv[1] = 1
        for i in range(2, p):
            inv[i] = (p - (p // i) * inv[p % i] % p) % p
        return _readonly(np.array(inv, dtype=np.int64))

    def inversion_orbits(self) -> list[tuple[int, ...]]:
        """Orbits of x -> 1/x on the nonzero elements, ordered by smallest element."""
        inv = self.inverse_table if self.p < INVERSE_TABLE_LIMIT else None
        orbits = []
        for x in range(1, self.p):
            y = int(inv[x]) if inv is not None else pow(x, -1, self.p)
            if x == y:
                orbits.append((x,))
            elif x < y:
                orbits.append((x, y))
        return orbits

    def descriptor(self) -> dict:
        return {"kind": "prime", "p": self.p}


def fp_inverse(ctx: PrimeFieldCtx, x: int) -> int:
    """Multiplicative inverse modulo p, with 0 mapped to 0."""
    x = ctx.check(x)
    if x == 0:
        return 0
    if "inverse_table" in ctx.__dict__:
        return int(ctx.inverse_table[x])
    return pow(x, -1, ctx.p)


# ---------------------------------------------------------------------------
# polynomials over F_2 encoded as int bitmasks


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bitmask polynomials."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _mulmod(a: int, b: int, m: int, n: int) -> int:
    r = 0
    top = 1 << n
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= m
    return r


def is_irreducible(modulus: int, n: int) -> bool:
    """Ben-Or test: gcd(x^(2^i) - x, f) = 1 for 1 <= i <= n/2, and deg f = n."""
    if modulus.bit_length() != n + 1:
        return False
    if n == 1:
        return True
    x = 2
    t = x
    for _ in range(n // 2):
        t = _mulmod(t, t, modulus, n)
        if poly_gcd(modulus, t ^ x) != 1:
            return False
    return True


@dataclass(frozen=True)
class BinaryFieldCtx:
    """GF(2^n) = F_2[x] / (modulus)."""

    n: int
    modulus: int = 0

    kind = "binary"

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
            raise UsageError(f"extension degree must be a positive integer, got {n!r}")
        object.__setattr__(self, "n", int(n))
        m = self.modulus or DEFAULT_MODULI.get(int(n))
        if m is None:
            raise UsageError(f"no default modulus for n = {n}; pass one explicitly")
        if not is_irreducible(int(m), int(n)):
            raise UsageError(f"modulus {m:#x} is not an irreducible polynomial of degree {n}")
        object.__setattr__(self, "modulus", int(m))

    @property
    def order(self) -> int:
        return 1 << self.n

    def check(self, x: int) -> int:
        if not 0 <= x < (1 << self.n):
            raise UsageError(f"{x:#x} does not encode an element of GF(2^{self.n})")
        return int(x)

    def add(self, x: int, y: int) -> int:
        return x ^ y

    def neg(self, x: int) -> int:
        return x

    def mul(self, x: int, y: int) -> int:
        return _mulmod(x, y, self.modulus, self.n)

    def square(self, x: int) -> int:
        return _mulmod(x, x, self.modulus, self.n)

    def add_vec(self, a: int, xs: np.ndarray) -> np.ndarray:
        return xs ^ a

    def inv(self, x: int) -> int:
        return gf2_inverse(self, x)

    def trace(self, x: int) -> int:
        return gf2_trace(self, x)

    @cached_property
    def trace_mask(self) -> int:
        """Bit i set iff Tr(x^i) = 1; Tr is then the parity of (element & mask)."""
        mask = 0
        for i in range(self.n):
            if gf2_trace(self, 1 << i):
                mask |= 1 << i
        return mask

    @cached_property
    def trace_table(self) -> np.ndarray:
        xs = np.arange(self.order, dtype=np.uint64) & np.uint64(self.trace_mask)
        return _readonly((np.bitwise_count(xs) & 1).astype(np.uint8))

    @cached_property
    def _log_exp(self) -> tuple[np.ndarray, np.ndarray]:
        if self.n > LOG_TABLE_MAX_DEGREE:
            raise UsageError(f"log tables are only built for n <= {LOG_TABLE_MAX_DEGREE}")
        q1 = self.order - 1
        primes = list(factorint(q1)) if q1 > 1 else []
        g = 1 if q1 == 1 else 2
        while any(self._pow(g, q1 // r) == 1 for r in primes):
            g += 1
        exp = np.zeros(2 * q1 + 1, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        e = 1
        for i in range(q1):
            exp[i] = e
            log[e] = i
            e = self.mul(e, g)
        exp[q1:2 * q1] = exp[:q1]
        return _readonly(log), _readonly(exp)

    @property
    def log_table(self) -> np.ndarray:
        return self._log_exp[0]

    @property
    def exp_table(self) -> np.ndarray:
        """exp[i] = g^i for 0 <= i < 2(q-1), g a fixed primitive element."""
        return self._log_exp[1]

    @cached_property
    def inverse_table(self) -> np.ndarray:
        log, exp = self._log_exp
        q1 = self.order - 1
        inv = np.zeros(self.order, dtype=np.int64)
        inv[1:] = exp[(q1 - log[1:]) % q1]
        return _readonly(inv)

    def _pow(self, x: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, x)
            x = self.square(x)
            e >>= 1
        return r

    def inversion_orbits(self) -> list[tuple[int, ...]]:
        inv = self.inverse_table if self.n <= LOG_TABLE_MAX_DEGREE else None
        orbits = []
        for x in range(1, self.order):
            y = int(inv[x]) if inv is not None else gf2_inverse(self, x)
            if x == y:
                orbits.append((x,))
            elif x < y:
                orbits.append((x, y))
        return orbits

    def descriptor(self) -> dict:
        return {"kind": "binary", "n": self.n, "modulus": hex(self.modulus)}


def gf2_trace(ctx: BinaryFieldCtx, x: int) -> int:
    """Tr(x) = x + x^2 + x^4 + ... + x^(2^(n-1)), by repeated squaring."""
    x = ctx.check(x)
    t = s = x
    for _ in range(ctx.n - 1):
        t = ctx.square(t)
        s ^= t
    if s not in (0, 1):
        raise AssertionError(f"trace of {x:#x} left F_2: {s:#x}")
    return s


def gf2_inverse(ctx: BinaryFieldCtx, x: int) -> int:
    """Inverse in GF(2^n) by the binary extended Euclidean algorithm; 0 maps to 0."""
    x = ctx.check(x)
    if x == 0:
        return 0
    u, v = x, ctx.modulus
    g1, g2 = 1, 0
    while u != 1:
        j = u.bit_length() - v.bit_length()
        if j < 0:
            u, v = v, u
            g1, g2 = g2, g1
            j = -j
        u ^= v << j
        g1 ^= g2 << j
    return poly_mod(g1, ctx.modulus)


FieldCtx = Union[PrimeFieldCtx, BinaryFieldCtx]


def field_from_descriptor(d: dict) -> FieldCtx:
    kind = d.get("kind")
    if kind == "prime":
        return PrimeFieldCtx(d["p"])
    if kind == "binary":
        m = d.get("modulus")
        if isinstance(m, str):
            m = int(m, 16)
        return BinaryFieldCtx(d["n"], m or 0)
    raise UsageError(f"unknown field kind {kind!r}")
