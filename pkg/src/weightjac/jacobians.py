"""Higher-weight Jacobians of products of CM elliptic curves.

Everything is computed on isomorphism classes: a CurveClass is (order,
reduced form), a ProductAV is a tuple of classes over one field.  The
m-Jacobian of a product is the product over m-subsets of the composed,
conductor-transferred classes; the same object is computable from lattices
through cmlattice.image_lattice_L, which the test suite uses as an
independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from . import binforms, cmlattice
from .binforms import Form, compose, element_order, form_to_lattice, power, principal_form
from .cmlattice import CMLattice, LatticeTuple, Order, ideal_class
from .errors import (
    BadWeight,
    DegenerateBasis,
    DimensionMismatch,
    DimensionTooSmall,
    FieldMismatch,
    NotADivisor,
    OrderMismatch,
    PrimitivityViolation,
)
from .quadfield import FieldTag


@dataclass(frozen=True)
class CurveClass:
    """Isomorphism class of a CM elliptic curve: an order and a reduced form."""

    order: Order
    form: Form

    def __post_init__(self):
        object.__setattr__(self, "form", binforms.reduce(self.form))
        if self.form.discriminant != self.order.discriminant:
            raise OrderMismatch(
                f"form disc {self.form.discriminant} != order disc {self.order.discriminant}"
            )

    @classmethod
    def principal(cls, order: Order) -> "CurveClass":
        return cls(order, principal_form(order.discriminant))

    @classmethod
    def of_lattice(cls, lat: CMLattice) -> "CurveClass":
        order, form = ideal_class(lat)
        return cls(order, form)

    @property
    def field(self) -> FieldTag:
        return self.order.field

    @property
    def conductor(self) -> int:
        return self.order.f

    def is_principal(self) -> bool:
        return self.form == principal_form(self.order.discriminant)

    def lattice(self) -> CMLattice:
        return form_to_lattice(self.form)

    def __str__(self):
        return f"({self.order.discriminant}:{self.form})"


@dataclass(frozen=True)
class ProductAV:
    """A product E_1 x ... x E_n of pairwise isogenous CM elliptic curves."""

    factors: tuple[CurveClass, ...]

    def __post_init__(self):
        if not self.factors:
            raise DimensionTooSmall("a product needs at least one factor")
        field = self.factors[0].field
        for f in self.factors[1:]:
            if f.field != field:
                raise FieldMismatch("factors with CM by different fields")

    @property
    def field(self) -> FieldTag:
        return self.factors[0].field

    @property
    def n(self) -> int:
        return len(self.factors)

    def conductors(self) -> tuple[int, ...]:
        return tuple(f.conductor for f in self.factors)

    def __str__(self):
        return " x ".join(str(f) for f in self.factors)


def phi(cls: CurveClass, c: int) -> CurveClass:
    """Extension of scalars Cl(Z[f*alpha]) -> Cl(Z[c*alpha]) for c | f.

    Realized as the lattice product with the order of conductor c; it is a
    group homomorphism, phi_{f,f} is the identity and phi_{d,c} o phi_{c,f}
    = phi_{d,f}.
    """
    f = cls.conductor
    if c < 1 or f % c != 0:
        raise NotADivisor(f"{c} does not divide the conductor {f}")
    if c == f:
        return cls
    target = Order(cls.field, c)
    lifted = cmlattice.lattice_product(cls.lattice(), target.as_lattice())
    order, form = ideal_class(lifted)
    return CurveClass(order, form)


def brauer_jacobian_pair(e1: CurveClass, e2: CurveClass) -> CurveClass:
    """Class of the weight-2 Jacobian of E1 x E2.

    Lives over the order of conductor gcd(f1, f2); with equal orders it is
    just the product of the two classes.
    """
    if e1.field != e2.field:
        raise FieldMismatch("curves with CM by different fields")
    c = math.gcd(e1.conductor, e2.conductor)
    form = compose(phi(e1, c).form, phi(e2, c).form)
    return CurveClass(Order(e1.field, c), form)


def m_jacobian(x: ProductAV, m: int) -> ProductAV:
    """The weight-m Jacobian: one factor per m-subset of the curve factors.

    The factor for subset S is prod_{i in S} phi_{d_S, f_i}([E_i]) over the
    order of conductor d_S = gcd of the subset conductors.
    """
    n = x.n
    if m < 2 or m > n:
        raise BadWeight(f"need 2 <= m <= {n}, got {m}")
    out = []
    for subset in combinations(range(n), m):
        curves = [x.factors[i] for i in subset]
        d = math.gcd(*(e.conductor for e in curves))
        form = principal_form(Order(x.field, d).discriminant)
        for e in curves:
            form = compose(form, phi(e, d).form)
        out.append(CurveClass(Order(x.field, d), form))
    return ProductAV(tuple(out))


def m_jacobian_lattice_route(x: ProductAV, m: int) -> ProductAV:
    """Same object computed from period lattices via the wedge-image formula.

    Independent of the class-group route; the two must agree componentwise.
    """
    tup = LatticeTuple(tuple(e.lattice() for e in x.factors))
    comps = cmlattice.image_lattice_L(tup, m)
    return ProductAV(tuple(CurveClass.of_lattice(lat) for lat in comps))


def kummer_jacobian(x: ProductAV, m: int) -> ProductAV:
    """m-Jacobian of the Kummer variety of X: canonically that of X itself."""
    return m_jacobian(x, m)


@dataclass(frozen=True)
class TwoMaximalReport:
    ok: bool
    reason: str | None
    ns_rank: int | None
    rank_image: int | None


def is_two_maximal(components) -> TwoMaximalReport:
    """Whether a tuple of lattices underlies a 2-maximal complex torus.

    Accepts a LatticeTuple, an iterable of CMLattice, or raw generator pairs.
    True iff there are at least two components and all endomorphism orders
    sit in one imaginary quadratic field; then NS rank is n^2 and the image
    lattice in weight 2 has rank n^2 - n.
    """
    if isinstance(components, LatticeTuple):
        lats = list(components.components)
    else:
        lats = []
        for item in components:
            if isinstance(item, CMLattice):
                lats.append(item)
            else:
                g1, g2 = item
                try:
                    lats.append(cmlattice.canonicalize(g1, g2))
                except DegenerateBasis:
                    return TwoMaximalReport(False, "degenerate basis", None, None)
    n = len(lats)
    if n < 2:
        return TwoMaximalReport(False, "dim X > 1 required", None, None)
    field = lats[0].field
    if any(lat.field != field for lat in lats[1:]):
        return TwoMaximalReport(False, "not isogenous (distinct CM fields)", None, None)
    return TwoMaximalReport(True, None, n * n, n * n - n)


@dataclass(frozen=True)
class SurfaceReport:
    """Canonical model of a 2-maximal abelian surface: C/O(A) x Jacobian."""

    big_order: Order
    jacobian: CurveClass
    primitivity_degree: int


def surface_decompose(e1: CurveClass, e2: CurveClass) -> SurfaceReport:
    """E1 x E2 = C/O(A) x Jacobian with O(A) of conductor lcm(f1, f2)."""
    if e1.field != e2.field:
        raise FieldMismatch("curves with CM by different fields")
    f1, f2 = e1.conductor, e2.conductor
    big = Order(e1.field, math.lcm(f1, f2))
    return SurfaceReport(
        big_order=big,
        jacobian=brauer_jacobian_pair(e1, e2),
        primitivity_degree=math.lcm(f1, f2) // math.gcd(f1, f2),
    )


@dataclass(frozen=True)
class Decomposition:
    """X = C/R_n x ... x C/R_2 x terminal with r_1 | r_2 | ... | r_n.

    conductors is the ascending divisor chain (r_1 = gcd, r_n = lcm); the
    terminal class has conductor r_1; primitivity_degree = r_2/r_1 for n = 2.
    """

    conductors: tuple[int, ...]
    terminal_class: CurveClass
    primitivity_degree: int | None

    def to_record(self) -> dict:
        return {
            "conductors": list(self.conductors),
            "terminal_order_discriminant": self.terminal_class.order.discriminant,
            "terminal_form": list(self.terminal_class.form.as_tuple()),
            "primitivity_degree": self.primitivity_degree,
        }


def _pair_rule(e1: CurveClass, e2: CurveClass) -> tuple[CurveClass, CurveClass]:
    """Replace {E1, E2} by {principal at lcm, composed class at gcd}."""
    big = CurveClass.principal(Order(e1.field, math.lcm(e1.conductor, e2.conductor)))
    return big, brauer_jacobian_pair(e1, e2)


def n_decompose(x: ProductAV) -> Decomposition:
    """Canonical decomposition of Lemma-4.13 type via repeated pair reduction.

    Applies the surface rule to the lexicographically first pair whose
    conductors are incomparable under divisibility, then sweeps the class
    data down to the smallest conductor.  The result is independent of the
    factor order.
    """
    n = x.n
    if n < 2:
        raise DimensionTooSmall("decomposition needs n >= 2")
    work = list(x.factors)
    while True:
        hit = None
        for i, j in combinations(range(n), 2):
            fi, fj = work[i].conductor, work[j].conductor
            if fi % fj and fj % fi:
                hit = (i, j)
                break
        if hit is None:
            break
        i, j = hit
        work[i], work[j] = _pair_rule(work[i], work[j])
    work.sort(key=lambda e: -e.conductor)
    for k in range(n - 1):
        work[k], work[k + 1] = _pair_rule(work[k], work[k + 1])
    chain = tuple(e.conductor for e in reversed(work))
    primitivity = chain[1] // chain[0] if n == 2 else None
    return Decomposition(chain, work[-1], primitivity)


def is_isomorphic(x: ProductAV, y: ProductAV) -> bool:
    """Equality of canonical decompositions (the full isomorphism invariant)."""
    if x.field != y.field:
        raise FieldMismatch("products over different fields")
    if x.n != y.n:
        raise DimensionMismatch(f"n = {x.n} vs {y.n}")
    if x.n == 1:
        return x.factors[0] == y.factors[0]
    return n_decompose(x) == n_decompose(y)


def is_fixed_point(x: ProductAV) -> bool:
    """Whether X is isomorphic to its (n-1)-Jacobian (n >= 3).

    Holds iff all conductors agree and the terminal class has order
    dividing n - 2; for n = 3 that means X = (C/O)^3.
    """
    if x.n < 3:
        raise DimensionTooSmall("fixed points are defined for n >= 3")
    dec = n_decompose(x)
    if len(set(dec.conductors)) != 1:
        return False
    return (x.n - 2) % element_order(dec.terminal_class.form) == 0


def jacobian_orbit(x: ProductAV) -> list[Decomposition]:
    """Decompositions visited by iterating the (n-1)-Jacobian, up to first repeat."""
    if x.n < 3:
        raise DimensionTooSmall("orbits are defined for n >= 3")
    seen: list[Decomposition] = []
    current = x
    while True:
        dec = n_decompose(current)
        if dec in seen:
            return seen
        seen.append(dec)
        current = m_jacobian(current, current.n - 1)


def product_report(x: ProductAV) -> dict:
    """JSON-ready summary of a product: classes, decomposition, all Jacobians.

    Key names are stable and versioned by the schema field.
    """
    record = {
        "schema": 1,
        "input": [
            {"discriminant": e.order.discriminant, "form": list(e.form.as_tuple())}
            for e in x.factors
        ],
        "field_d": x.field.d,
        "conductors": list(x.conductors()),
        "classes": [list(e.form.as_tuple()) for e in x.factors],
        "decomposition": n_decompose(x).to_record() if x.n >= 2 else None,
        "jacobians_by_weight": {
            str(m): [
                {"discriminant": e.order.discriminant, "form": list(e.form.as_tuple())}
                for e in m_jacobian(x, m).factors
            ]
            for m in range(2, x.n + 1)
        },
        "predicates": {
            "two_maximal": x.n >= 2,
            "fixed_point_of_previous_weight": is_fixed_point(x) if x.n >= 3 else None,
        },
    }
    return record


def same_field_of_definition(e1: CurveClass, e2: CurveClass) -> bool:
    """Q(j(E1)) = Q(j(E2)) for classes over one order: [E1]^2 = [E2]^2."""
    if e1.order != e2.order:
        raise OrderMismatch(
            "classes over distinct orders; use field_contains for the phi transfer"
        )
    return power(e1.form, 2) == power(e2.form, 2)


def field_contains(e_small: CurveClass, e_big: CurveClass) -> bool:
    """Q(j(e_small)) inside Q(j(e_big)) for conductors c | f.

    Via the Galois description this is [e_small]^2 = phi_{c,f}([e_big])^2.
    """
    if e_small.field != e_big.field:
        raise FieldMismatch("classes over different fields")
    c, f = e_small.conductor, e_big.conductor
    if f % c != 0:
        raise NotADivisor(f"{c} does not divide {f}")
    return power(e_small.form, 2) == power(phi(e_big, c).form, 2)


def product_definable_over_jacobian_field(e1: CurveClass, e2: CurveClass) -> bool:
    """Whether E1 x E2 admits a model over Q(j(Jacobian)) (primitive case).

    Defined when the orders coincide; true iff the Jacobian class has order
    at most 2 (equivalently, a real j-invariant).
    """
    f1, f2 = e1.conductor, e2.conductor
    if math.gcd(f1, f2) != math.lcm(f1, f2):
        raise PrimitivityViolation("defined only for equal orders (primitive case)")
    return element_order(brauer_jacobian_pair(e1, e2).form) <= 2
