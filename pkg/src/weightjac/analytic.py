"""High-precision j-invariants and Hilbert class polynomials.

j is evaluated as E4^3 / Delta from the q-expansions (Delta as the 24th power
of the Euler product), after exact fundamental-domain reduction of the period
ratio; both series have integer coefficients.  Class polynomials come from
the root product over the reduced forms of the discriminant, with coefficient
rounding verified and automatic precision escalation.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import mpmath
from mpmath import mp

from .binforms import element_order, enumerate_reduced, form_to_lattice, validate_discriminant
from .cmlattice import CMLattice, ideal_class, parse_lattice
from .errors import LowerHalfPlane, ParseError, PrecisionExhausted
from .quadfield import MP_LOCK, QuadElem

_GUARD_BITS = 48
_ESCALATION_CAP = 1 << 16


@dataclass(frozen=True)
class PrecComplex:
    """A complex value carried together with its precision in bits."""

    re: mpmath.mpf
    im: mpmath.mpf
    prec: int

    def __post_init__(self):
        if self.prec < 64:
            raise ValueError("prec must be at least 64")

    @classmethod
    def from_mpc(cls, z, prec: int) -> "PrecComplex":
        with MP_LOCK, mp.workprec(prec):
            z = mpmath.mpc(z)
            return cls(+z.real, +z.imag, prec)

    def to_mpc(self) -> mpmath.mpc:
        # mpc() rounds to the ambient precision, so pin it to the stored one
        with MP_LOCK, mp.workprec(self.prec):
            return mpmath.mpc(self.re, self.im)

    def _binary(self, other, op):
        prec = min(self.prec, other.prec)
        with MP_LOCK, mp.workprec(prec):
            return PrecComplex.from_mpc(op(self.to_mpc(), other.to_mpc()), prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def abs(self) -> mpmath.mpf:
        with MP_LOCK, mp.workprec(self.prec):
            return abs(self.to_mpc())

    def __str__(self):
        digits = max(int(self.prec * 0.3013) + 2, 17)
        return f"{mpmath.nstr(self.re, digits)} + {mpmath.nstr(self.im, digits)}i"


@lru_cache(maxsize=None)
def _sigma3(n: int) -> int:
    total = 0
    for i in range(1, math.isqrt(n) + 1):
        if n % i == 0:
            total += i ** 3
            j = n // i
            if j != i:
                total += j ** 3
    return total


def fundamental_domain_exact(tau: QuadElem) -> QuadElem:
    """Exact SL2(Z) reduction to |Re| <= 1/2, |tau| >= 1 (upper half-plane).

    Boundary convention: Re = +1/2 rather than -1/2, and Re >= 0 on the unit
    circle; every orbit has exactly one such representative.
    """
    if tau.y <= 0:
        raise LowerHalfPlane(f"{tau} is not in the upper half-plane")
    one = QuadElem.from_rational(tau.field, 1)
    while True:
        shift = math.floor(tau.x + Fraction(1, 2))
        if shift:
            tau = tau - QuadElem.from_rational(tau.field, shift)
        if tau.norm() >= 1:
            break
        # strict inversion: the imaginary part grows, so this terminates
        tau = -(one / tau)
    if tau.norm() == 1 and tau.x < 0:
        tau = -(one / tau)
    if tau.x == Fraction(-1, 2):
        tau = tau + one
    return tau


def _series_terms(prec: int, im_tau: float) -> int:
    return int(math.ceil((prec + 40) * math.log(2) / (2 * math.pi * im_tau))) + 8


def _j_series(tau_c, wp: int, nterms: int):
    """E4(q)^3 / Delta(q) at q = exp(2*pi*i*tau), all at working precision wp."""
    with MP_LOCK, mp.workprec(wp):
        q = mpmath.exp(2j * mp.pi * tau_c)
        e4_sum = mpmath.mpf(_sigma3(nterms))
        for n in range(nterms - 1, 0, -1):
            e4_sum = e4_sum * q + _sigma3(n)
        e4 = 1 + 240 * e4_sum * q
        euler = mpmath.mpc(1)
        qn = mpmath.mpc(1)
        for n in range(1, nterms + 1):
            qn *= q
            euler *= 1 - qn
        delta = q * euler ** 24
        return e4 ** 3 / delta


def j_invariant(tau, prec: int = 128) -> PrecComplex:
    """j(tau) with relative error below 2^(8-prec); Im(tau) must be positive."""
    wp = prec + _GUARD_BITS
    with MP_LOCK, mp.workprec(wp):
        tau_c = mpmath.mpc(tau.to_mpc() if isinstance(tau, PrecComplex) else tau)
        if tau_c.imag <= 0:
            raise LowerHalfPlane(f"Im(tau) = {tau_c.imag} <= 0")
        # numeric fundamental-domain reduction; the slack below 1 avoids
        # cycling at boundary points, at a negligible cost in series length
        near_one = 1 - mpmath.mpf(2) ** -20
        while True:
            shift = mpmath.floor(tau_c.real + mpmath.mpf("0.5"))
            tau_c -= shift
            if abs(tau_c) >= near_one:
                break
            tau_c = -1 / tau_c
        value = _j_series(tau_c, wp, _series_terms(prec, float(tau_c.imag)))
    return PrecComplex.from_mpc(value, prec)


def j_of_lattice(lat: CMLattice, prec: int = 128) -> PrecComplex:
    """j of the homothety class: exact reduction of tau, then the q-series."""
    tau = fundamental_domain_exact(lat.tau)
    wp = prec + _GUARD_BITS
    im = float(tau.y) * math.sqrt(-lat.field.d)
    with MP_LOCK, mp.workprec(wp):
        value = _j_series(tau.embed(wp), wp, _series_terms(prec, im))
    return PrecComplex.from_mpc(value, prec)


@dataclass(frozen=True)
class ClassPolynomial:
    """Monic integer polynomial with the j-invariants of a discriminant as roots.

    Coefficients are listed from the leading 1 down to the constant term.
    Irreducibility over Q holds classically but is not verified here.
    """

    D: int
    coefficients: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, z: PrecComplex) -> PrecComplex:
        with MP_LOCK, mp.workprec(z.prec):
            zc = z.to_mpc()
            acc = mpmath.mpc(0)
            for c in self.coefficients:
                acc = acc * zc + c
        return PrecComplex.from_mpc(acc, z.prec)


def hilbert_class_polynomial(D: int, prec: int = 128) -> ClassPolynomial:
    """Expand prod (X - j) over the reduced forms of D and round to integers.

    Each rounded coefficient must sit within 0.25 of its float value;
    otherwise the precision doubles (cap 2^16 bits) before failing.
    """
    validate_discriminant(D)
    forms = enumerate_reduced(D)
    prec = max(prec, 64)
    while True:
        roots = [j_of_lattice(form_to_lattice(f), prec) for f in forms]
        wp = prec + _GUARD_BITS
        with MP_LOCK, mp.workprec(wp):
            coeffs = [mpmath.mpc(1)]
            for root in roots:
                r = root.to_mpc()
                coeffs.append(mpmath.mpc(0))
                for k in range(len(coeffs) - 1, 0, -1):
                    coeffs[k] = coeffs[k] - r * coeffs[k - 1]
            rounded = []
            ok = True
            for c in coeffs:
                n = int(mpmath.nint(c.real))
                if abs(c - n) >= mpmath.mpf("0.25"):
                    ok = False
                    break
                rounded.append(n)
        if ok:
            return ClassPolynomial(D, tuple(rounded))
        if prec * 2 > _ESCALATION_CAP:
            raise PrecisionExhausted(f"coefficients of H_{D} not recognized at {prec} bits")
        prec *= 2


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>zeta3|sqrt|cbrt|root4)|(?P<op>[-+*^()·]))"
)


def _tokenize(expr: str) -> list[str]:
    out, pos = [], 0
    while pos < len(expr):
        m = _TOKEN_RE.match(expr, pos)
        if not m or m.end() == pos:
            if expr[pos:].strip():
                raise ParseError(f"bad expression near {expr[pos:pos + 12]!r}")
            break
        out.append(m.group("int") or m.group("name") or m.group("op"))
        pos = m.end()
    return out


class _ExprParser:
    """Recursive descent for: integers, + - * ^, sqrt(n), cbrt(n), root4(n), zeta3."""

    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def parse(self):
        value = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing tokens at {self.peek()!r}")
        return value

    def expr(self):
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        value = sign * self.term()
        while self.peek() in ("+", "-"):
            if self.take() == "+":
                value += self.term()
            else:
                value -= self.term()
        return value

    def term(self):
        value = self.factor()
        while self.peek() in ("*", "·"):
            self.take()
            value *= self.factor()
        return value

    def factor(self):
        value = self.atom()
        if self.peek() == "^":
            self.take()
            value **= int(self.take())
        return value

    def atom(self):
        tok = self.peek()
        if tok == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value
        if tok == "zeta3":
            self.take()
            return (-1 + mpmath.sqrt(3) * 1j) / 2
        if tok in ("sqrt", "cbrt", "root4"):
            name = self.take()
            self.take("(")
            sign = 1
            if self.peek() == "-":
                self.take()
                sign = -1
            arg = sign * int(self.take())
            self.take(")")
            if name == "sqrt":
                # negative radicands take the root with positive imaginary part
                return mpmath.sqrt(mpmath.mpc(arg)) if arg < 0 else mpmath.sqrt(arg)
            if name == "cbrt":
                return mpmath.cbrt(arg)
            return mpmath.root(arg, 4)
        if tok == "-":
            self.take()
            return -self.atom()
        if tok is not None and tok.isdigit():
            return mpmath.mpmathify(int(self.take()))
        raise ParseError(f"unexpected token {tok!r}")


def evaluate_expression(expr: str, prec: int = 128) -> PrecComplex:
    """Evaluate the algebraic-expression mini-language at the given precision."""
    tokens = _tokenize(expr)
    with MP_LOCK, mp.workprec(prec + 16):
        value = _ExprParser(tokens).parse()
    return PrecComplex.from_mpc(value, prec)


def verify_exact(lat: CMLattice, expr: str, prec: int = 128) -> bool:
    """|j(L) - value(expr)| < 2^(16-prec) * |value(expr)|.

    The expression is evaluated with doubled guard precision: the appendix
    values cancel catastrophically (terms around 2^61 summing to around
    2^10), and the tolerance is relative to the small final value.
    """
    expected = evaluate_expression(expr, 2 * prec + 64)
    computed = j_of_lattice(lat, prec + 16)
    with MP_LOCK, mp.workprec(2 * prec + 64):
        diff = abs(computed.to_mpc() - expected.to_mpc())
        return diff < mpmath.mpf(2) ** (16 - prec) * abs(expected.to_mpc())


def j_is_real(lat: CMLattice, prec: int = 128) -> bool:
    """Numeric reality test; agrees with 'class order at most 2' classically."""
    value = j_of_lattice(lat, prec)
    with MP_LOCK, mp.workprec(prec):
        return abs(value.im) < mpmath.mpf(2) ** (16 - prec) * (1 + abs(value.to_mpc()))


def appendix_fixtures() -> list[dict]:
    """The golden lattice/expression pairs shipped with the package."""
    text = (
        resources.files("weightjac")
        .joinpath("data", "appendix_fixtures.json")
        .read_text(encoding="utf-8")
    )
    return json.loads(text)


def verify_appendix(prec: int = 256) -> list[dict]:
    """Check every golden fixture; returns one record per lattice."""
    results = []
    for rec in appendix_fixtures():
        lat = parse_lattice(rec["lattice"])
        order, form = ideal_class(lat)
        ok = verify_exact(lat, rec["exact"], prec)
        real_ok = j_is_real(lat, prec) == (element_order(form) <= 2)
        results.append(
            {
                "lattice": rec["lattice"],
                "D": rec["D"],
                "form": list(form.as_tuple()),
                "matches_exact_value": ok,
                "reality_matches_class_order": real_ok,
            }
        )
    return results
