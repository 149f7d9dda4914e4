"""Exact arithmetic over Q and over imaginary quadratic fields Q(sqrt(d)).

Elements are x + y*sqrt(d) with big-rational coordinates and d a squarefree
negative integer; sqrt(d) always denotes the root with positive imaginary
part. Everything here is immutable and pure.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DivisionByZero, FieldMismatch, ParseError, RationalInput

BigRational = Fraction

# mpmath's working precision is process-global state; every code path that
# touches it serializes on this lock so concurrent callers stay safe and
# results stay bit-identical
MP_LOCK = threading.RLock()

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text: str) -> BigRational:
    """Parse "p" or "p/q" into a rational in lowest terms."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise ParseError(f"not a rational literal: {text!r}")
    return Fraction(text)


def format_rational(q: BigRational) -> str:
    return str(q)


def is_squarefree(n: int) -> bool:
    """True iff no prime square divides n (n != 0)."""
    n = abs(n)
    if n == 0:
        return False
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 2
    return True


def squarefree_part(n: int) -> int:
    """Largest squarefree divisor m of n with n/m a perfect square (sign kept)."""
    if n == 0:
        raise ValueError("squarefree part of 0 is undefined")
    sign = -1 if n < 0 else 1
    n = abs(n)
    m = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e % 2:
                m *= p
        p += 1 if p == 2 else 2
    return sign * m * n


@dataclass(frozen=True)
class FieldTag:
    """The imaginary quadratic field Q(sqrt(d)), d squarefree and negative."""

    d: int

    def __post_init__(self):
        if self.d >= 0 or not is_squarefree(self.d):
            raise ParseError(f"field tag needs a squarefree negative d, got {self.d}")

    @property
    def dK(self) -> int:
        """Fundamental discriminant: d when d = 1 mod 4, else 4d."""
        return self.d if self.d % 4 == 1 else 4 * self.d

    def sqrt_dK(self) -> "QuadElem":
        """sqrt(dK) as an element of the field (= sqrt(d) or 2*sqrt(d))."""
        y = 1 if self.d % 4 == 1 else 2
        return QuadElem(self, Fraction(0), Fraction(y))

    def __repr__(self):
        return f"FieldTag(d={self.d})"


@dataclass(frozen=True)
class QuadElem:
    """x + y*sqrt(d) with exact rational coordinates."""

    field: FieldTag
    x: BigRational
    y: BigRational

    @classmethod
    def from_rational(cls, field: FieldTag, x) -> "QuadElem":
        return cls(field, Fraction(x), Fraction(0))

    @classmethod
    def make(cls, field: FieldTag, x, y) -> "QuadElem":
        return cls(field, Fraction(x), Fraction(y))

    def _check(self, other: "QuadElem") -> None:
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_rational(self) -> bool:
        return self.y == 0

    def __add__(self, other: "QuadElem") -> "QuadElem":
        self._check(other)
        return QuadElem(self.field, self.x + other.x, self.y + other.y)

    def __sub__(self, other: "QuadElem") -> "QuadElem":
        self._check(other)
        return QuadElem(self.field, self.x - other.x, self.y - other.y)

    def __neg__(self) -> "QuadElem":
        return QuadElem(self.field, -self.x, -self.y)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.field, self.x * other, self.y * other)
        self._check(other)
        d = self.field.d
        return QuadElem(
            self.field,
            self.x * other.x + d * self.y * other.y,
            self.x * other.y + self.y * other.x,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return QuadElem(self.field, self.x / other, self.y / other)
        self._check(other)
        n = other.norm()
        if n == 0:
            raise DivisionByZero("division by zero element")
        return (self * other.conj()) / n

    def conj(self) -> "QuadElem":
        return QuadElem(self.field, self.x, -self.y)

    def norm(self) -> BigRational:
        """x^2 - d*y^2; nonnegative, zero only at zero."""
        return self.x * self.x - self.field.d * self.y * self.y

    def trace(self) -> BigRational:
        return 2 * self.x

    def minimal_polynomial(self) -> tuple[int, int, int]:
        """Primitive integer (a, b, c), a > 0, with a*z^2 + b*z + c = 0.

        Only defined for non-rational elements (degree 2 over Q).
        """
        if self.y == 0:
            raise RationalInput(f"{self} is rational; no quadratic minimal polynomial")
        # z^2 - trace*z + norm = 0, cleared to a primitive integer triple
        b_r = -self.trace()
        c_r = self.norm()
        lcm = math.lcm(b_r.denominator, c_r.denominator)
        a, b, c = lcm, int(b_r * lcm), int(c_r * lcm)
        g = math.gcd(a, math.gcd(abs(b), abs(c)))
        return (a // g, b // g, c // g)

    def embed(self, prec: int = 128) -> mpmath.mpc:
        """Complex value with sqrt(d) on the positive imaginary axis.

        Each component has relative error below 2^(1-prec).
        """
        if prec < 64:
            raise ValueError("prec must be at least 64")
        with MP_LOCK, mpmath.workprec(prec + 8):
            re = mpmath.mpf(self.x.numerator) / self.x.denominator
            im = (
                mpmath.mpf(self.y.numerator)
                / self.y.denominator
                * mpmath.sqrt(-self.field.d)
            )
            with mpmath.workprec(prec):
                return mpmath.mpc(+re, +im)

    def __str__(self):
        sign = "+" if self.y >= 0 else "-"
        return f"{self.x}{sign}{abs(self.y)}*sqrt({self.field.d})"

    def __repr__(self):
        return f"QuadElem({self})"


_ELEM_RE = re.compile(
    r"^\s*(?P<x>[+-]?\d+(?:/\d+)?)\s*"
    r"(?:(?P<sign>[+-])\s*(?P<y>\d+(?:/\d+)?)\s*\*\s*sqrt\(\s*(?P<d>-\d+)\s*\))?\s*$"
)
_PURE_SQRT_RE = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?P<y>\d+(?:/\d+)?)\s*\*\s*sqrt\(\s*(?P<d>-\d+)\s*\)\s*$"
)


def parse_quadelem(text: str, field: FieldTag | None = None) -> QuadElem:
    """Parse "x+y*sqrt(d)", "x", or "y*sqrt(d)" (x, y as p/q rationals)."""
    m = _PURE_SQRT_RE.match(text)
    if m:
        d = int(m.group("d"))
        tag = _resolve_field(d, field, text)
        y = Fraction(m.group("y"))
        if m.group("sign") == "-":
            y = -y
        return QuadElem(tag, Fraction(0), y)
    m = _ELEM_RE.match(text)
    if not m:
        raise ParseError(f"not a quadratic element literal: {text!r}")
    x = Fraction(m.group("x"))
    if m.group("y") is None:
        if field is None:
            raise ParseError(f"no field tag available for rational literal {text!r}")
        return QuadElem(field, x, Fraction(0))
    d = int(m.group("d"))
    tag = _resolve_field(d, field, text)
    y = Fraction(m.group("y"))
    if m.group("sign") == "-":
        y = -y
    return QuadElem(tag, x, y)


def _resolve_field(d: int, field: FieldTag | None, text: str) -> FieldTag:
    tag = FieldTag(d)
    if field is not None and tag != field:
        raise ParseError(f"literal {text!r} names sqrt({d}), expected sqrt({field.d})")
    return tag
