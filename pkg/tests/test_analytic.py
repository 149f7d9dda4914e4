import random

import mpmath
import pytest
from mpmath import mp

from weightjac import analytic
from weightjac.analytic import (
    PrecComplex,
    evaluate_expression,
    fundamental_domain_exact,
    hilbert_class_polynomial,
    j_invariant,
    j_is_real,
    j_of_lattice,
    verify_appendix,
    verify_exact,
)
from weightjac.binforms import element_order, enumerate_reduced, form_to_lattice
from weightjac.cmlattice import ideal_class, parse_lattice
from weightjac.errors import LowerHalfPlane, ParseError
from weightjac.quadfield import FieldTag, QuadElem

GAUSS = FieldTag(-1)
EISEN = FieldTag(-3)

LAT_3I = parse_lattice("⟨1+0*sqrt(-1), 0+3*sqrt(-1)⟩")


def test_classical_values():
    assert abs(j_invariant(mpmath.mpc(0, 1), 128).to_mpc() - 1728) < mpmath.mpf(2) ** -100
    with mp.workprec(160):
        omega = mpmath.mpc(0.5, mpmath.sqrt(3) / 2)
        assert abs(j_invariant(omega, 128).to_mpc()) < mpmath.mpf(2) ** -90
    with pytest.raises(LowerHalfPlane):
        j_invariant(mpmath.mpc(0, -1), 128)


def test_modular_invariance_samples():
    rng = random.Random(313)
    for _ in range(10):
        with mp.workprec(260):
            tau = mpmath.mpc(rng.uniform(-1.5, 1.5), rng.uniform(0.3, 2.5))
            shifted = tau + 1
            inverted = -1 / tau
        a = j_invariant(tau, 160).to_mpc()
        b = j_invariant(shifted, 160).to_mpc()
        c = j_invariant(inverted, 160).to_mpc()
        with mp.workprec(260):
            scale = 1 + abs(a)
            assert abs(a - b) < mpmath.mpf(2) ** -120 * scale
            assert abs(a - c) < mpmath.mpf(2) ** -120 * scale


def test_fundamental_domain_exact():
    from fractions import Fraction as F

    t = fundamental_domain_exact(QuadElem.make(GAUSS, 5, 3))
    assert t == QuadElem.make(GAUSS, 0, 3)
    # tau = i/2 inverts to 2i
    t2 = fundamental_domain_exact(QuadElem.make(GAUSS, 0, F(1, 2)))
    assert t2 == QuadElem.make(GAUSS, 0, 2)
    t3 = fundamental_domain_exact(QuadElem.make(GAUSS, F(1, 3), F(2, 3)))
    assert t3.norm() >= 1 and abs(t3.x) <= F(1, 2)
    with pytest.raises(LowerHalfPlane):
        fundamental_domain_exact(QuadElem.make(GAUSS, 1, -1))


def test_golden_j_value_disc_36():
    val = j_of_lattice(LAT_3I, 256).to_mpc()
    with mp.workprec(400):
        expected = 76771008 + 44330496 * mpmath.sqrt(3)
        assert abs(val - expected) < abs(expected) * mpmath.mpf(2) ** -200
        assert abs(val.imag) < mpmath.mpf(2) ** -180 * abs(expected)


def test_j_of_lattice_homothety_invariance():
    lat = parse_lattice("⟨3+0*sqrt(-1), 1+2*sqrt(-1)⟩")
    scaled = lat.scaled(QuadElem.make(GAUSS, 7, 5))
    a = j_of_lattice(lat, 192).to_mpc()
    b = j_of_lattice(scaled, 192).to_mpc()
    assert abs(a - b) < (1 + abs(a)) * mpmath.mpf(2) ** -160


def test_verify_appendix_all_fixtures():
    results = verify_appendix(256)
    assert len(results) == 13
    assert all(r["matches_exact_value"] for r in results)
    assert all(r["reality_matches_class_order"] for r in results)


def test_verify_exact_rejects_wrong_value():
    assert verify_exact(LAT_3I, "0", 128) is False
    assert verify_exact(LAT_3I, "76771008 + 44330496*sqrt(3)", 192) is True


def test_doubling_precision_shrinks_error():
    with mp.workprec(1024):
        exact = 76771008 + 44330496 * mpmath.sqrt(3)
        e1 = abs(j_of_lattice(LAT_3I, 96).to_mpc() - exact)
        e2 = abs(j_of_lattice(LAT_3I, 192).to_mpc() - exact)
        assert e2 < e1 / mpmath.mpf(2) ** 48 or e2 == 0


def test_hilbert_class_polynomial_values():
    assert hilbert_class_polynomial(-4, 128).coefficients == (1, -1728)
    h36 = hilbert_class_polynomial(-36, 128)
    assert h36.coefficients == (1, -2 * 76771008, 76771008 ** 2 - 3 * 44330496 ** 2)
    # escalation from a deliberately tight starting precision
    h144 = hilbert_class_polynomial(-144, 64)
    assert h144.degree == 4
    assert h144 == hilbert_class_polynomial(-144, 256)


def test_hilbert_class_polynomial_exact_expansion_oracle():
    sympy = pytest.importorskip("sympy")
    X = sympy.symbols("X")
    sqrt3 = sympy.sqrt(3)
    r12 = sympy.root(12, 4)
    i = sympy.I
    zeta3 = sympy.Rational(-1, 2) + sympy.sqrt(3) * i / 2
    cbrt2 = sympy.root(2, 3)
    cases = {
        -4: [sympy.Integer(1728)],
        -36: [76771008 + 44330496 * sqrt3, 76771008 - 44330496 * sqrt3],
        -144: [
            5894625992142600 + 3403263903336192 * sqrt3 + 3167093925247392 * r12 + 914261265145368 * r12 ** 3,
            5894625992142600 - 3403263903336192 * sqrt3 - i * (3167093925247392 * r12 - 914261265145368 * r12 ** 3),
            5894625992142600 - 3403263903336192 * sqrt3 + i * (3167093925247392 * r12 - 914261265145368 * r12 ** 3),
            5894625992142600 + 3403263903336192 * sqrt3 - 3167093925247392 * r12 - 914261265145368 * r12 ** 3,
        ],
        -108: [
            31710790944000 * cbrt2 ** 2 + 39953093016000 * cbrt2 + 50337742902000,
            31710790944000 * (zeta3 * cbrt2) ** 2 + 39953093016000 * zeta3 * cbrt2 + 50337742902000,
            31710790944000 * (zeta3 ** 2 * cbrt2) ** 2 + 39953093016000 * zeta3 ** 2 * cbrt2 + 50337742902000,
        ],
        -192: [
            820762881440077125 * sympy.sqrt(6) + 1160733998424384000 * sqrt3 + 1421603011620136125 * sympy.sqrt(2) + 2010450259344609000,
            -820762881440077125 * sympy.sqrt(6) - 1160733998424384000 * sqrt3 + 1421603011620136125 * sympy.sqrt(2) + 2010450259344609000,
            -820762881440077125 * sympy.sqrt(6) + 1160733998424384000 * sqrt3 - 1421603011620136125 * sympy.sqrt(2) + 2010450259344609000,
            820762881440077125 * sympy.sqrt(6) - 1160733998424384000 * sqrt3 - 1421603011620136125 * sympy.sqrt(2) + 2010450259344609000,
        ],
    }
    for D, roots in cases.items():
        poly = sympy.expand(sympy.prod([X - r for r in roots]))
        coeffs = []
        for c in sympy.Poly(poly, X).all_coeffs():
            c = sympy.simplify(sympy.expand(c))
            assert c.is_integer, (D, c)
            coeffs.append(int(c))
        assert hilbert_class_polynomial(D, 256).coefficients == tuple(coeffs), D


def test_hilbert_polynomial_roots_evaluate_small():
    # scale = size of the largest Horner term; the bare coefficients are far
    # smaller than c_k * |j|^(deg-k) and the residual is P'(j) * root error
    for D in (-36, -108, -144):
        poly = hilbert_class_polynomial(D, 256)
        deg = poly.degree
        for f in enumerate_reduced(D):
            root = j_of_lattice(form_to_lattice(f), 256)
            residual = poly.evaluate(root)
            with mp.workprec(320):
                mag = max(abs(root.to_mpc()), mpmath.mpf(1))
                scale = max(abs(c) * mag ** (deg - k) for k, c in enumerate(poly.coefficients))
                assert abs(residual.to_mpc()) < mpmath.mpf(2) ** -240 * scale


def test_hilbert_class_polynomial_precision_exhausted(monkeypatch):
    from weightjac import analytic as analytic_module
    from weightjac.errors import PrecisionExhausted

    # h(-1999) is large enough that 64 bits cannot resolve the coefficients
    monkeypatch.setattr(analytic_module, "_ESCALATION_CAP", 64)
    with pytest.raises(PrecisionExhausted):
        analytic_module.hilbert_class_polynomial(-1999, 64)


def test_j_is_real_examples():
    assert j_is_real(LAT_3I, 192) is True
    assert j_is_real(parse_lattice("⟨3+0*sqrt(-1), 1+2*sqrt(-1)⟩"), 192) is False
    assert j_is_real(parse_lattice("⟨4+0*sqrt(-3), 2+1*sqrt(-3)⟩"), 192) is True


def test_j_is_real_matches_class_order_sampled():
    rng = random.Random(317)
    checked = 0
    while checked < 40:
        D = -rng.randrange(3, 800)
        if D % 4 not in (0, 1):
            continue
        for f in enumerate_reduced(D):
            lat = form_to_lattice(f)
            assert j_is_real(lat, 160) == (element_order(f) <= 2)
        checked += 1


def test_expression_language():
    with mp.workprec(200):
        z = evaluate_expression("zeta3^3", 128).to_mpc()
        assert abs(z - 1) < mpmath.mpf(2) ** -100
        v = evaluate_expression("2*(3 - sqrt(4))^2 - cbrt(27)", 128).to_mpc()
        assert abs(v - (-1)) < mpmath.mpf(2) ** -100
        w = evaluate_expression("root4(16) + sqrt(-1)", 128).to_mpc()
        assert abs(w - mpmath.mpc(2, 1)) < mpmath.mpf(2) ** -100
    with pytest.raises(ParseError):
        evaluate_expression("sqrt(2) +", 128)
    with pytest.raises(ParseError):
        evaluate_expression("frob(2)", 128)


def test_concurrent_evaluation_is_bit_identical():
    from concurrent.futures import ThreadPoolExecutor

    forms = [f for D in (-36, -144, -108, -192) for f in enumerate_reduced(D)]
    lats = [form_to_lattice(f) for f in forms]
    serial = [j_of_lattice(lat, 192) for lat in lats]
    with ThreadPoolExecutor(max_workers=8) as pool:
        threaded = list(pool.map(lambda lat: j_of_lattice(lat, 192), lats * 4))
    for k, value in enumerate(threaded):
        expected = serial[k % len(lats)]
        assert value.re == expected.re and value.im == expected.im


def test_prec_complex_tracks_minimum_precision():
    a = PrecComplex.from_mpc(mpmath.mpc(1, 1), 256)
    b = PrecComplex.from_mpc(mpmath.mpc(2, 0), 128)
    assert (a * b).prec == 128
    with pytest.raises(ValueError):
        PrecComplex.from_mpc(mpmath.mpc(0), 32)
