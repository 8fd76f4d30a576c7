"""Exact arithmetic and ordering in the real quadratic field Q(sqrt 2)."""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from typing import Union

Rational = Union[int, Fraction]

# 140/99 < sqrt(2) < 99/70
_SQRT2_LO = Fraction(140, 99)
_SQRT2_HI = Fraction(99, 70)


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


@total_ordering
class QNum:
    """The number ``a + b*sqrt(2)`` with rational ``a`` and ``b``.

    Instances are immutable and hashable; equality is exact because
    ``{1, sqrt 2}`` is a basis of the field over Q.
    """

    __slots__ = ("a", "b", "_hash")

    def __init__(self, a: Rational = 0, b: Rational = 0):
        object.__setattr__(self, "a", a if type(a) is Fraction else Fraction(a))
        object.__setattr__(self, "b", b if type(b) is Fraction else Fraction(b))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("QNum is immutable")

    @classmethod
    def coerce(cls, x: QNum | Rational) -> QNum:
        return x if isinstance(x, QNum) else cls(x)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __repr__(self) -> str:
        return f"QNum({self.a!s}, {self.b!s})"

    def __str__(self) -> str:
        return format_qnum(self)

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.a, self.b))
            object.__setattr__(self, "_hash", h)
        return h

    def __eq__(self, other) -> bool:
        if isinstance(other, QNum):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QNum(other)
        elif not isinstance(other, QNum):
            return NotImplemented
        if self.b == other.b:
            return self.a < other.a
        return (self - other).sign() < 0

    def __add__(self, other):
        if isinstance(other, QNum):
            return QNum(self.a + other.a, self.b + other.b)
        if isinstance(other, (int, Fraction)):
            return QNum(self.a + other, self.b)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> QNum:
        return QNum(-self.a, -self.b)

    def __sub__(self, other):
        if isinstance(other, QNum):
            return QNum(self.a - other.a, self.b - other.b)
        if isinstance(other, (int, Fraction)):
            return QNum(self.a - other, self.b)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QNum):
            return QNum(self.a * other.a + 2 * self.b * other.b,
                        self.a * other.b + self.b * other.a)
        if isinstance(other, (int, Fraction)):
            return QNum(self.a * other, self.b * other)
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self) -> QNum:
        return QNum(self.a, -self.b)

    def norm(self) -> Fraction:
        """``a^2 - 2 b^2``; zero only for the zero element."""
        return self.a * self.a - 2 * self.b * self.b

    def inv(self) -> QNum:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QNum division by zero")
        return QNum(self.a / n, -self.b / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("QNum division by zero")
            return QNum(self.a / other, self.b / other)
        if isinstance(other, QNum):
            return self * other.inv()
        return NotImplemented

    def __rtruediv__(self, other):
        return QNum(other) * self.inv()

    def sign(self) -> int:
        """Exact sign of ``a + b sqrt 2``."""
        sa, sb = _sign(self.a), _sign(self.b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: |a| vs |b| sqrt 2 decides
        return sa if self.a * self.a > 2 * self.b * self.b else sb

    def floor(self) -> int:
        """Largest integer ``n <= self``."""
        if self.b == 0:
            return self.a.numerator // self.a.denominator
        lo_s, hi_s = (_SQRT2_LO, _SQRT2_HI) if self.b > 0 else (_SQRT2_HI, _SQRT2_LO)
        lo = _floor_frac(self.a + self.b * lo_s)
        hi = _floor_frac(self.a + self.b * hi_s) + 1
        # invariant: lo <= self < hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self < mid:
                hi = mid
            else:
                lo = mid
        return lo

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * 2 ** 0.5


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


SQRT2 = QNum(0, 1)
THETA = QNum(-1, 1)
"""Rotation number ``sqrt(2) - 1``, irrational and in ``[0, 1)``."""

ZERO = QNum(0)
ONE = QNum(1)


def compare(x: QNum | Rational, y: QNum | Rational) -> str:
    """``'lt'``, ``'eq'`` or ``'gt'``."""
    s = (QNum.coerce(x) - QNum.coerce(y)).sign()
    return {-1: "lt", 0: "eq", 1: "gt"}[s]


def mod1(x: QNum | Rational) -> QNum:
    """``x - floor(x)``, always in ``[0, 1)``."""
    x = QNum.coerce(x)
    return x - x.floor()


def format_qnum(x: QNum) -> str:
    if x.b == 0:
        return str(x.a)
    if x.a == 0:
        return f"{x.b} r2"
    op = "+" if x.b > 0 else "-"
    return f"{x.a} {op} {abs(x.b)} r2"


_RAT = r"\d+(?:/\d+)?"
_QNUM_RE = re.compile(
    rf"^\s*(?P<a>-?{_RAT})?\s*(?:(?P<op>[+-]?)\s*(?P<b>{_RAT})\s*r2)?\s*$"
)


def parse_qnum(text: str) -> QNum:
    """Inverse of :func:`format_qnum`; also accepts plain rationals."""
    m = _QNUM_RE.match(text)
    if not m or (m.group("a") is None and m.group("b") is None):
        raise ValueError(f"not a Q(sqrt 2) number: {text!r}")
    a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
    b = Fraction(0)
    if m.group("b") is not None:
        if m.group("a") is not None and not m.group("op"):
            raise ValueError(f"missing operator in {text!r}")
        b = Fraction(m.group("b"))
        if m.group("op") == "-":
            b = -b
    return QNum(a, b)


def rational_between(lo: QNum, hi: QNum) -> Fraction:
    """A dyadic rational ``q`` with ``lo <= q < hi`` (requires ``lo < hi``)."""
    if not lo < hi:
        raise ValueError("empty interval")
    if lo.is_rational:
        return lo.a
    k = 0
    while True:
        scale = 2 ** k
        q = Fraction(-((-lo * scale).floor()), scale)  # ceil(lo * 2^k) / 2^k
        if q < hi:
            return q
        k += 1
