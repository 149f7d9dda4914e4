"""Binary quadratic forms of negative discriminant.

Reduction, Gauss composition (united-forms construction), enumeration of the
reduced primitive forms of a discriminant, class-group structure, and the
classical form/lattice dictionary: the form (a, b, c) corresponds to the
proper ideal (a, (-b+sqrt(D))/2) of the order of discriminant D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DiscriminantMismatch, InvalidDiscriminant, InvalidForm, ParseError
from .quadfield import FieldTag, QuadElem, squarefree_part


@dataclass(frozen=True)
class Form:
    """Primitive positive-definite form a*x^2 + b*xy + c*y^2, b^2 - 4ac < 0."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        for v in (self.a, self.b, self.c):
            if not isinstance(v, int):
                raise InvalidForm(f"non-integer coefficient {v!r}")
        if self.a <= 0:
            raise InvalidForm(f"leading coefficient must be positive: {self.as_tuple()}")
        if self.discriminant >= 0:
            raise InvalidForm(f"discriminant must be negative: {self.as_tuple()}")
        if math.gcd(self.a, math.gcd(abs(self.b), abs(self.c))) != 1:
            raise InvalidForm(f"form is not primitive: {self.as_tuple()}")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def conjugate(self) -> "Form":
        """The inverse class (a, -b, c)."""
        return Form(self.a, -self.b, self.c)

    def evaluate(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (-a < b <= a <= c):
            return False
        if (b == a or a == c) and b < 0:
            return False
        return True

    def __str__(self):
        return f"{self.a},{self.b},{self.c}"


def parse_form(text: str) -> Form:
    parts = text.split(",")
    if len(parts) != 3:
        raise ParseError(f"form literal must be 'a,b,c': {text!r}")
    try:
        a, b, c = (int(p.strip()) for p in parts)
    except ValueError as exc:
        raise ParseError(f"bad form literal {text!r}") from exc
    try:
        return Form(a, b, c)
    except InvalidForm as exc:
        raise ParseError(str(exc)) from exc


def validate_discriminant(D: int) -> int:
    if D >= 0 or D % 4 not in (0, 1):
        raise InvalidDiscriminant(f"need D < 0 and D = 0,1 mod 4, got {D}")
    return D


@lru_cache(maxsize=None)
def fundamental_decomposition(D: int) -> tuple[int, int]:
    """Split D = f^2 * dK with dK a fundamental discriminant; returns (dK, f)."""
    validate_discriminant(D)
    m = squarefree_part(D)
    t = math.isqrt(D // m)
    if m % 4 == 1:
        return (m, t)
    return (4 * m, t // 2)


def principal_form(D: int) -> Form:
    """The identity class: x^2 - (D/4)y^2 or x^2 + xy + ((1-D)/4)y^2."""
    validate_discriminant(D)
    k = D % 2
    return Form(1, k, (k * k - D) // 4)


def reduce(form: Form) -> Form:
    """The unique reduced representative of the proper equivalence class."""
    a, b, c = form.a, form.b, form.c
    D = form.discriminant
    while True:
        if a > c:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # translate b into (-a, a]
            t = (a - b) // (2 * a)
            b = b + 2 * a * t
            c = (b * b - D) // (4 * a)
            continue
        if (b == -a) or (a == c and b < 0):
            b = -b
            continue
        return Form(a, b, c)


def _crt(r1: int, m1: int, r2: int, m2: int) -> int:
    """x = r1 mod m1 and x = r2 mod m2 (solvable by construction here)."""
    g = math.gcd(m1, m2)
    if (r2 - r1) % g != 0:
        raise ValueError("inconsistent congruences")
    l = m1 // g * m2
    t = ((r2 - r1) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g)
    return (r1 + m1 * t) % l


def _prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _with_coprime_lead(form: Form, n: int) -> Form:
    """An SL2(Z)-equivalent form whose leading coefficient is coprime to n."""
    if math.gcd(form.a, n) == 1:
        return form
    x0, y0, mod = 1, 0, 1
    for p in _prime_factors(n):
        if form.a % p:
            xp, yp = 1, 0
        elif form.c % p:
            xp, yp = 0, 1
        else:
            # p | a and p | c force p coprime to b by primitivity
            xp, yp = 1, 1
        x0, y0, mod = _crt(x0, mod, xp, p), _crt(y0, mod, yp, p), mod * p
    g = math.gcd(x0, y0)
    x0, y0 = x0 // g, y0 // g
    # complete (x0, y0) to an SL2(Z) matrix [[x0, u], [y0, v]]
    gg, v, neg_u = _ext_gcd(x0, y0)
    u = -neg_u
    a2 = form.evaluate(x0, y0)
    b2 = 2 * (form.a * x0 * u + form.c * y0 * v) + form.b * (x0 * v + y0 * u)
    c2 = form.evaluate(u, v)
    return Form(a2, b2, c2)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def compose(f: Form, g: Form) -> Form:
    """Reduced Gauss composition via united forms.

    Brings g to an equivalent form with leading coefficient coprime to f.a,
    lifts both to a common middle coefficient B and composes concordantly.
    """
    if f.discriminant != g.discriminant:
        raise DiscriminantMismatch(
            f"disc {f.discriminant} vs {g.discriminant}"
        )
    D = f.discriminant
    f = reduce(f)
    g = _with_coprime_lead(reduce(g), f.a)
    B = _crt(f.b, 2 * f.a, g.b, 2 * g.a)
    A = f.a * g.a
    C = (B * B - D) // (4 * A)
    return reduce(Form(A, B, C))


def power(form: Form, k: int) -> Form:
    """k-th composition power (negative k through the conjugate form)."""
    D = form.discriminant
    if k < 0:
        return power(form.conjugate(), -k)
    result = principal_form(D)
    base = reduce(form)
    while k:
        if k & 1:
            result = compose(result, base)
        base = compose(base, base)
        k >>= 1
    return result


def element_order(form: Form) -> int:
    """Order of the class in the form class group."""
    identity = principal_form(form.discriminant)
    current = reduce(form)
    k = 1
    while current != identity:
        current = compose(current, form)
        k += 1
    return k


@lru_cache(maxsize=None)
def _enumerate_reduced(D: int) -> tuple[Form, ...]:
    validate_discriminant(D)
    out = []
    amax = math.isqrt(-D // 3)
    parity = D % 2
    for a in range(1, amax + 1):
        # b ranges over (-a, a] with b = D mod 2
        b = -a + 1
        if (b - parity) % 2:
            b += 1
        while b <= a:
            num = b * b - D
            if num % (4 * a) == 0:
                c = num // (4 * a)
                if c >= a and not (b < 0 and a == c):
                    if math.gcd(a, math.gcd(abs(b), c)) == 1:
                        out.append(Form(a, b, c))
            b += 2
    return tuple(sorted(out, key=Form.as_tuple))


def enumerate_reduced(D: int) -> list[Form]:
    """All reduced primitive forms of discriminant D, sorted by (a, b, c)."""
    return list(_enumerate_reduced(D))


def class_number(D: int) -> int:
    return len(_enumerate_reduced(D))


@dataclass(frozen=True)
class ClassGroup:
    """Form class group of a discriminant with its full composition table."""

    D: int
    elements: tuple[Form, ...]
    structure: tuple[int, ...]
    table: tuple[tuple[int, ...], ...]

    @property
    def h(self) -> int:
        return len(self.elements)

    @property
    def identity_index(self) -> int:
        return self.elements.index(principal_form(self.D))

    def index_of(self, form: Form) -> int:
        return self.elements.index(reduce(form))

    def compose_index(self, i: int, j: int) -> int:
        return self.table[i][j]

    def order_of_index(self, i: int) -> int:
        e = self.identity_index
        k, j = 1, i
        while j != e:
            j = self.table[j][i]
            k += 1
        return k

    def to_record(self) -> dict:
        return {
            "D": self.D,
            "h": self.h,
            "structure": list(self.structure),
            "elements": [list(f.as_tuple()) for f in self.elements],
        }


def _invariant_factors(table: tuple[tuple[int, ...], ...], identity: int) -> tuple[int, ...]:
    """Divisor chain d_1 | d_2 | ... from a finite abelian multiplication table."""
    n = len(table)
    coset_of = list(range(n))  # element index -> coset id (starts as singletons)
    reps = list(range(n))  # coset id -> representative element

    def q_mul(ci: int, cj: int) -> int:
        return coset_of[table[reps[ci]][reps[cj]]]

    factors = []
    while len(reps) > 1:
        e = coset_of[identity]
        best, best_ord = None, 0
        for ci in range(len(reps)):
            k, cj = 1, ci
            while cj != e:
                cj = q_mul(cj, ci)
                k += 1
            if k > best_ord:
                best, best_ord = ci, k
        factors.append(best_ord)
        # merge cosets along the cyclic subgroup generated by `best`
        subgroup = [e]
        cj = best
        while cj != e:
            subgroup.append(cj)
            cj = q_mul(cj, best)
        merged: dict[int, list[int]] = {}
        for ci in range(len(reps)):
            orbit = frozenset(q_mul(ci, s) for s in subgroup)
            merged.setdefault(min(orbit), []).append(ci)
        new_reps = []
        new_id_of_old = {}
        for new_id, (key, members) in enumerate(sorted(merged.items())):
            new_reps.append(reps[key])
            for ci in members:
                new_id_of_old[ci] = new_id
        coset_of = [new_id_of_old[coset_of[x]] for x in range(n)]
        reps = new_reps
    return tuple(reversed(factors))


@lru_cache(maxsize=None)
def class_group(D: int) -> ClassGroup:
    """Class group with composition table and invariant-factor structure."""
    elements = _enumerate_reduced(D)
    index = {f: i for i, f in enumerate(elements)}
    table = tuple(
        tuple(index[compose(f, g)] for g in elements) for f in elements
    )
    identity = index[principal_form(D)]
    structure = _invariant_factors(table, identity)
    return ClassGroup(D=D, elements=elements, structure=structure, table=table)


def form_to_lattice(form: Form):
    """The lattice with basis {a, (-b+sqrt(D))/2} inside Q(sqrt(d)).

    Its endomorphism order has discriminant D = b^2 - 4ac.
    """
    from . import cmlattice  # local import; cmlattice depends on this module

    D = form.discriminant
    dK, f = fundamental_decomposition(D)
    d = squarefree_part(D)
    field = FieldTag(d)
    # sqrt(D) = t*sqrt(d) with t = sqrt(D/d)
    t = math.isqrt(D // d)
    g1 = QuadElem.from_rational(field, form.a)
    g2 = QuadElem.make(field, Fraction(-form.b, 2), Fraction(t, 2))
    return cmlattice.canonicalize(g1, g2)
