"""Lattices in an imaginary quadratic field.

A CMLattice is a rank-2 Z-module inside Q(sqrt(d)), stored in a canonical
Hermite-normalized basis <p/den, (q + r*sqrt(d))/den>.  Every such lattice has
complex multiplication, its endomorphism ring is an order, and homothety
classes correspond to reduced binary quadratic forms.  The lattice product
(additive span of pairwise element products) and the wedge-image computation
give two independent routes to higher-weight Jacobians.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product as iter_product

from . import binforms
from .binforms import Form, fundamental_decomposition
from .errors import BadWeight, DegenerateBasis, FieldMismatch, NotCM, ParseError
from .quadfield import FieldTag, QuadElem, parse_quadelem


@dataclass(frozen=True)
class Order:
    """The order Z + f*O_K of conductor f in the field Q(sqrt(d))."""

    field: FieldTag
    f: int

    def __post_init__(self):
        if self.f < 1:
            raise NotCM(f"conductor must be positive, got {self.f}")

    @property
    def discriminant(self) -> int:
        return self.f * self.f * self.field.dK

    @classmethod
    def from_discriminant(cls, D: int) -> "Order":
        dK, f = fundamental_decomposition(D)
        d = dK if dK % 4 == 1 else dK // 4
        return cls(FieldTag(d), f)

    def generator(self) -> QuadElem:
        """f * alpha with O_K = Z[alpha], alpha = (dK + sqrt(dK)) / 2."""
        alpha = (QuadElem.from_rational(self.field, self.field.dK) + self.field.sqrt_dK()) / 2
        return alpha * self.f

    def as_lattice(self) -> "CMLattice":
        return canonicalize(QuadElem.from_rational(self.field, 1), self.generator())

    def __str__(self):
        return f"O(d={self.field.d}, f={self.f})"


@dataclass(frozen=True)
class CMLattice:
    """Canonical basis <p/den, (q + r*sqrt(d))/den>; p, r > 0, 0 <= q < p."""

    field: FieldTag
    den: int
    p: int
    q: int
    r: int

    def __post_init__(self):
        ok = (
            self.den > 0
            and self.p > 0
            and self.r > 0
            and 0 <= self.q < self.p
            and math.gcd(math.gcd(self.p, self.q), math.gcd(self.r, self.den)) == 1
        )
        if not ok:
            raise DegenerateBasis(f"non-canonical lattice data {self!r}")

    @property
    def g1(self) -> QuadElem:
        return QuadElem.make(self.field, Fraction(self.p, self.den), 0)

    @property
    def g2(self) -> QuadElem:
        return QuadElem.make(
            self.field, Fraction(self.q, self.den), Fraction(self.r, self.den)
        )

    @property
    def tau(self) -> QuadElem:
        """g2/g1, normalized to the upper half-plane by construction."""
        return QuadElem.make(
            self.field, Fraction(self.q, self.p), Fraction(self.r, self.p)
        )

    def generators(self) -> tuple[QuadElem, QuadElem]:
        return (self.g1, self.g2)

    def scaled(self, factor) -> "CMLattice":
        """The homothetic lattice factor * L (factor a nonzero QuadElem or rational)."""
        if isinstance(factor, (int, Fraction)):
            factor = QuadElem.make(self.field, factor, 0)
        return canonicalize(self.g1 * factor, self.g2 * factor)

    def contains(self, z: QuadElem) -> bool:
        """Exact membership test against the canonical basis."""
        if z.field != self.field:
            return False
        # z = m*(p/den) + n*(q + r sqrt d)/den with integer m, n
        n = z.y * self.den / self.r
        if n.denominator != 1:
            return False
        m = (z.x * self.den - n * self.q) / self.p
        return m.denominator == 1

    def __str__(self):
        return f"⟨{self.g1}, {self.g2}⟩"


def _hnf_pairs(rows: list[tuple[int, int]]) -> tuple[int, int, int]:
    """Hermite form of the Z-span of integer vectors (x, y).

    Returns (p, q, r) with span = Z*(p, 0) + Z*(q, r), p, r > 0, 0 <= q < p.
    Raises DegenerateBasis when the span has rank < 2.
    """
    q = r = 0
    xs: list[int] = []
    for x, y in rows:
        if y == 0:
            if x:
                xs.append(x)
            continue
        if r == 0:
            q, r = x, y
            continue
        g, s, t = binforms._ext_gcd(r, y)
        xs.append((y // g) * q - (r // g) * x)
        q, r = s * q + t * x, g
    if r == 0:
        raise DegenerateBasis("generators span rank < 2")
    if r < 0:
        q, r = -q, -r
    p = 0
    for x in xs:
        p = math.gcd(p, abs(x))
    if p == 0:
        raise DegenerateBasis("generators span rank < 2")
    return (p, q % p, r)


def from_generators(field: FieldTag, gens: list[QuadElem]) -> CMLattice:
    """Canonical lattice spanned over Z by the given elements."""
    den = 1
    for g in gens:
        if g.field != field:
            raise FieldMismatch(f"{g} not in Q(sqrt({field.d}))")
        den = math.lcm(den, g.x.denominator, g.y.denominator)
    rows = [(int(g.x * den), int(g.y * den)) for g in gens]
    p, q, r = _hnf_pairs(rows)
    g = math.gcd(math.gcd(p, q), math.gcd(r, den))
    return CMLattice(field, den // g, p // g, q // g, r // g)


def canonicalize(g1: QuadElem, g2: QuadElem) -> CMLattice:
    """Canonical basis of Z*g1 + Z*g2 (generators must be R-independent)."""
    return from_generators(g1.field, [g1, g2])


def lattice_product(lat1: CMLattice, lat2: CMLattice) -> CMLattice:
    """Additive span of pairwise products; again a lattice for CM inputs.

    The endomorphism order of the result has conductor gcd(f1, f2).
    """
    if lat1.field != lat2.field:
        raise FieldMismatch(f"{lat1.field} vs {lat2.field}")
    v1, w1 = lat1.generators()
    v2, w2 = lat2.generators()
    return from_generators(lat1.field, [v1 * v2, v1 * w2, w1 * v2, w1 * w2])


def ideal_class(lat: CMLattice) -> tuple[Order, Form]:
    """(endomorphism order, reduced form of the homothety class)."""
    a, b, c = lat.tau.minimal_polynomial()
    order = Order.from_discriminant(b * b - 4 * a * c)
    if order.field != lat.field:
        raise NotCM(f"tau of {lat} lives in the wrong field")
    return (order, binforms.reduce(Form(a, b, c)))


def endomorphism_order(lat: CMLattice) -> Order:
    """The order {z : z*L inside L}, of discriminant disc(min poly of tau)."""
    return ideal_class(lat)[0]


def is_homothetic(lat1: CMLattice, lat2: CMLattice) -> bool:
    """True iff the lattices differ by a nonzero complex scale."""
    if lat1.field != lat2.field:
        raise FieldMismatch(f"{lat1.field} vs {lat2.field}")
    return ideal_class(lat1) == ideal_class(lat2)


def conjugate_lattice(lat: CMLattice) -> CMLattice:
    """Elementwise complex conjugate."""
    return canonicalize(lat.g1.conj(), lat.g2.conj())


def inverse_class(lat: CMLattice) -> CMLattice:
    """A representative of the inverse class: the conjugate lattice.

    lattice_product(L, inverse_class(L)) is homothetic to End(L).
    """
    return conjugate_lattice(lat)


@dataclass(frozen=True)
class LatticeTuple:
    """Nonempty tuple of lattices over one field (hence pairwise isogenous)."""

    components: tuple[CMLattice, ...]

    def __post_init__(self):
        if not self.components:
            raise DegenerateBasis("empty lattice tuple")
        field = self.components[0].field
        for lat in self.components[1:]:
            if lat.field != field:
                raise FieldMismatch("tuple components in different fields")

    @property
    def field(self) -> FieldTag:
        return self.components[0].field

    def __len__(self):
        return len(self.components)

    def __str__(self):
        return "[" + ", ".join(str(c) for c in self.components) + "]"


def image_lattice_L(tup: LatticeTuple, m: int) -> list[CMLattice]:
    """Image of wedge^m of the dual lattice in the antiholomorphic cotangent space.

    Component for indices i1 < ... < im is spanned by the 2^m products of
    {-eps_j * tau_j, eps_j} with eps_j = 1/(conj(tau_j) - tau_j); it comes out
    homothetic to the lattice product of the corresponding components.
    """
    n = len(tup)
    if m < 2 or m > n:
        raise BadWeight(f"need 2 <= m <= {n}, got {m}")
    field = tup.field
    choices = []
    for lat in tup.components:
        tau = lat.tau
        eps = QuadElem.from_rational(field, 1) / (tau.conj() - tau)
        choices.append((-(eps * tau), eps))
    out = []
    for subset in combinations(range(n), m):
        gens = []
        for picks in iter_product(*(choices[j] for j in subset)):
            g = QuadElem.from_rational(field, 1)
            for factor in picks:
                g = g * factor
            gens.append(g)
        out.append(from_generators(field, gens))
    return out


_LATTICE_RE = re.compile(r"^\s*⟨(?P<g1>[^,⟩]+),(?P<g2>[^,⟩]+)⟩\s*$")


def format_lattice(lat: CMLattice) -> str:
    return str(lat)


def parse_lattice(text: str, field: FieldTag | None = None) -> CMLattice:
    """Parse a lattice literal like "<1+0*sqrt(-1), 0+3*sqrt(-1)>" (angle brackets)."""
    m = _LATTICE_RE.match(text)
    if not m:
        raise ParseError(f"not a lattice literal: {text!r}")
    first, second = m.group("g1"), m.group("g2")
    # a field tag can come from either generator when not supplied
    if field is None:
        for part in (first, second):
            try:
                field = parse_quadelem(part).field
                break
            except ParseError:
                continue
        if field is None:
            raise ParseError(f"no sqrt(d) tag present in {text!r}")
    g1 = parse_quadelem(first, field)
    g2 = parse_quadelem(second, field)
    return canonicalize(g1, g2)


def format_lattice_tuple(tup: LatticeTuple) -> str:
    return str(tup)


def parse_lattice_tuple(text: str, field: FieldTag | None = None) -> LatticeTuple:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError(f"not a lattice tuple literal: {text!r}")
    inner = text[1:-1]
    parts = [p for p in re.split(r"(?<=⟩)\s*,", inner) if p.strip()]
    lats = [parse_lattice(p, field) for p in parts]
    if lats and field is None:
        field = lats[0].field
        lats = [parse_lattice(p, field) for p in parts]
    return LatticeTuple(tuple(lats))
