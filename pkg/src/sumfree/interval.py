"""Closed real intervals with outward-rounded arithmetic.

Every primitive operation is computed in round-to-nearest and then widened by
one ulp on each side with ``math.nextafter``.  IEEE 754 guarantees the nearest
result is within half an ulp of the exact one, so the widened interval always
contains the exact image.  No rounding-mode control is needed.

Cube roots are bracketed by checking candidate floats against exact rational
cubes, which makes the enclosure both rigorous and monotone in its argument.
"""

from __future__ import annotations

import math
from decimal import Decimal
from fractions import Fraction
from typing import Union

from .errors import DomainError

_INF = math.inf


def _dn(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


Number = Union[int, float, Fraction, Decimal, str]


class Interval:
    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DomainError(f"non-finite interval endpoint [{lo}, {hi}]")
        if lo > hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def exact(cls, value: Number) -> "Interval":
        """Tightest float interval containing an exact decimal or rational value."""
        if isinstance(value, Interval):
            return value
        if isinstance(value, float):
            return cls(value)
        v = Fraction(str(value)) if isinstance(value, (str, Decimal)) else Fraction(value)
        f = float(v)
        fv = Fraction(f)
        if fv == v:
            return cls(f)
        if fv < v:
            return cls(f, _up(f))
        return cls(_dn(f), f)

    # -- helpers -----------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Interval":
        if isinstance(other, Interval):
            return other
        if isinstance(other, float):
            return Interval(other)
        if isinstance(other, int) and abs(other) <= 1 << 53:
            return Interval(float(other))
        return Interval.exact(other)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return self.lo + (self.hi - self.lo) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def __eq__(self, other):
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def as_list(self) -> list[float]:
        return [self.lo, self.hi]

    # -- arithmetic --------------------------------------------------------

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __add__(self, other):
        o = self._coerce(other)
        return Interval(_dn(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Interval(_dn(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_dn(min(ps)), _up(max(ps)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise DomainError(f"division by an interval containing zero: {o!r}")
        qs = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_dn(min(qs)), _up(max(qs)))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def sqr(self) -> "Interval":
        lo, hi = self.lo, self.hi
        if lo >= 0:
            return Interval(max(0.0, _dn(lo * lo)), _up(hi * hi))
        if hi <= 0:
            return Interval(max(0.0, _dn(hi * hi)), _up(lo * lo))
        m = max(-lo, hi)
        return Interval(0.0, _up(m * m))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise DomainError("only nonnegative integer powers are supported")
        if n == 0:
            return Interval(1.0)
        if n == 1:
            return self
        if n == 2:
            return self.sqr()
        if n % 2:
            # odd powers are monotone: enclose each endpoint separately
            return Interval(_point_pow(self.lo, n).lo, _point_pow(self.hi, n).hi)
        a = self.sqr()
        return a ** (n // 2)

    def sqrt(self) -> "Interval":
        if self.lo < 0:
            raise DomainError(f"square root of an interval reaching below zero: {self!r}")
        return Interval(max(0.0, _dn(math.sqrt(self.lo))), _up(math.sqrt(self.hi)))

    def cbrt(self) -> "Interval":
        return Interval(cbrt_down(self.lo), cbrt_up(self.hi))

    def pow23(self) -> "Interval":
        """x^(2/3) for x >= 0, as cbrt(x)^2."""
        if self.lo < 0:
            raise DomainError(f"2/3 power of an interval reaching below zero: {self!r}")
        return self.cbrt().sqr()


def _point_pow(x: float, n: int) -> Interval:
    r = Interval(x)
    base = Interval(x)
    for _ in range(n - 1):
        r = r * base
    return r


def _cube_bracket(y: float) -> tuple[float, float]:
    """(largest float c with c^3 <= y, smallest float c with c^3 >= y)."""
    if y == 0:
        return 0.0, 0.0
    if y < 0:
        lo, hi = _cube_bracket(-y)
        return -hi, -lo
    c = y ** (1.0 / 3.0)
    c = c - (c * c * c - y) / (3 * c * c)
    fy = Fraction(y)
    lo = c
    while Fraction(lo) ** 3 > fy:
        lo = _dn(lo)
    while Fraction(_up(lo)) ** 3 <= fy:
        lo = _up(lo)
    hi = lo if Fraction(lo) ** 3 == fy else _up(lo)
    return lo, hi


def cbrt_down(y: float) -> float:
    return _cube_bracket(y)[0]


def cbrt_up(y: float) -> float:
    return _cube_bracket(y)[1]
