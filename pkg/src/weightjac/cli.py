"""Batch command-line front end emitting JSON reports.

One report object per invocation: {schema, command, input, result, timings}.
Exit codes: 0 success, 2 input error (machine-readable error record on
stdout), 1 internal failure.  classgroup and hcp results are cached in a
JSON-lines file selected by --cache or the WJ_CACHE environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from itertools import combinations
from pathlib import Path

import mpmath

from . import analytic, binforms, cmlattice, hodgecalc, jacobians
from .binforms import Form, parse_form, validate_discriminant
from .cmlattice import Order
from .errors import ParseError, WeightjacError
from .jacobians import CurveClass, ProductAV
from .quadfield import FieldTag, parse_quadelem

SCHEMA = 1

_CURVE_RE = re.compile(r"\(\s*(-\d+)\s*:\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")
_LATTICE_RE = re.compile(r"<\s*([^;>]+?)\s*;\s*([^>]+?)\s*>\s*@\s*(-\d+)")


def _parse_curves(text: str) -> list[CurveClass]:
    matches = list(_CURVE_RE.finditer(text))
    rest = _CURVE_RE.sub("", text).replace(",", "").strip()
    if not matches or rest:
        raise ParseError(f"curve list must look like '(D:a,b,c),(D:a,b,c)': {text!r}")
    out = []
    for m in matches:
        D, a, b, c = (int(g) for g in m.groups())
        validate_discriminant(D)
        form = Form(a, b, c)
        if form.discriminant != D:
            raise ParseError(f"form {a},{b},{c} has discriminant {form.discriminant}, not {D}")
        out.append(CurveClass(Order.from_discriminant(D), form))
    return out


def _parse_lattices(text: str) -> list[cmlattice.CMLattice]:
    matches = list(_LATTICE_RE.finditer(text))
    rest = _LATTICE_RE.sub("", text).replace(",", "").strip()
    if not matches or rest:
        raise ParseError(f"lattice list must look like '<g1;g2>@d,...': {text!r}")
    out = []
    for m in matches:
        field = FieldTag(int(m.group(3)))
        g1 = parse_quadelem(m.group(1), field)
        g2 = parse_quadelem(m.group(2), field)
        out.append(cmlattice.canonicalize(g1, g2))
    return out


def _order_record(order: Order) -> dict:
    return {"d": order.field.d, "conductor": order.f, "discriminant": order.discriminant}


def _curve_record(e: CurveClass) -> dict:
    return {"discriminant": e.order.discriminant, "form": list(e.form.as_tuple())}


def _mpf_str(x, prec: int) -> str:
    return mpmath.nstr(x, max(int(prec * 0.30103) + 2, 17))


class ResultCache:
    """Append-only JSON-lines cache keyed by discriminant."""

    def __init__(self, path: str):
        self.path = Path(path)
        self.entries: list[dict] = []
        self.rewrite_needed = False
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        for line in self.path.read_text().splitlines():
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                if not isinstance(rec, dict) or not isinstance(rec.get("D"), int):
                    raise ValueError("bad record")
            except Exception:
                # corrupt line: recompute what is asked and rewrite the file
                self.rewrite_needed = True
                continue
            self.entries.append(rec)

    def classgroup(self, D: int) -> dict | None:
        for rec in reversed(self.entries):
            if rec["D"] == D and rec.get("forms") is not None:
                return rec
        return None

    def hcp(self, D: int, prec: int) -> dict | None:
        for rec in reversed(self.entries):
            if rec["D"] == D and rec.get("hcp") is not None and rec.get("prec", 0) >= prec:
                return rec
        return None

    def put(self, rec: dict) -> None:
        self.entries.append(rec)
        if self.rewrite_needed:
            body = "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.entries)
            self.path.write_text(body)
            self.rewrite_needed = False
        else:
            with self.path.open("a") as fh:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _open_cache(args) -> ResultCache | None:
    path = args.cache or os.environ.get("WJ_CACHE")
    return ResultCache(path) if path else None


def _check_prec(args) -> int:
    if args.prec < 64:
        raise ParseError(f"--prec must be at least 64 bits, got {args.prec}")
    return args.prec


def _cmd_classgroup(args):
    D = validate_discriminant(args.discriminant)
    cache = _open_cache(args)
    hit = cache.classgroup(D) if cache else None
    if hit:
        result = {
            "D": D,
            "h": len(hit["forms"]),
            "structure": hit["structure"],
            "elements": hit["forms"],
        }
    else:
        group = binforms.class_group(D)
        result = group.to_record()
        if cache:
            cache.put(
                {
                    "D": D,
                    "forms": result["elements"],
                    "structure": result["structure"],
                    "hcp": None,
                    "prec": 0,
                }
            )
    return {"D": D}, result


def _cmd_reduce(args):
    form = parse_form(args.form)
    reduced = binforms.reduce(form)
    return (
        {"form": list(form.as_tuple())},
        {"reduced": list(reduced.as_tuple()), "discriminant": form.discriminant},
    )


def _cmd_compose(args):
    parts = [p for p in args.forms.split(";") if p.strip()]
    if len(parts) != 2:
        raise ParseError("compose needs exactly two forms separated by ';'")
    f, g = (parse_form(p) for p in parts)
    composed = binforms.compose(f, g)
    return (
        {"forms": [list(f.as_tuple()), list(g.as_tuple())]},
        {"composed": list(composed.as_tuple()), "discriminant": f.discriminant},
    )


def _cmd_latprod(args):
    lats = _parse_lattices(args.lattices)
    if len(lats) != 2:
        raise ParseError("latprod needs exactly two lattices")
    prod = cmlattice.lattice_product(lats[0], lats[1])
    order, form = cmlattice.ideal_class(prod)
    return (
        {"lattices": [str(lat) for lat in lats]},
        {
            "product": str(prod),
            "order": _order_record(order),
            "class": list(form.as_tuple()),
        },
    )


def _cmd_homothety(args):
    lats = _parse_lattices(args.lattices)
    if len(lats) != 2:
        raise ParseError("homothety needs exactly two lattices")
    verdict = cmlattice.is_homothetic(lats[0], lats[1])
    classes = [cmlattice.ideal_class(lat) for lat in lats]
    return (
        {"lattices": [str(lat) for lat in lats]},
        {
            "homothetic": verdict,
            "classes": [
                {"order": _order_record(o), "form": list(f.as_tuple())} for o, f in classes
            ],
        },
    )


def _cmd_endring(args):
    lats = _parse_lattices(args.lattices)
    if len(lats) != 1:
        raise ParseError("endring needs exactly one lattice")
    order, form = cmlattice.ideal_class(lats[0])
    return (
        {"lattice": str(lats[0])},
        {"order": _order_record(order), "class": list(form.as_tuple())},
    )


def _jacobian_result(x: ProductAV, m: int) -> dict:
    jac = jacobians.m_jacobian(x, m)
    factors = []
    for subset, factor in zip(combinations(range(x.n), m), jac.factors):
        factors.append(
            {
                "indices": list(subset),
                "discriminant": factor.order.discriminant,
                "form": list(factor.form.as_tuple()),
            }
        )
    return {"weight": m, "factors": factors}


def _cmd_jacobian(args):
    curves = _parse_curves(args.curves)
    x = ProductAV(tuple(curves))
    result = _jacobian_result(x, args.weight)
    return ({"curves": [_curve_record(e) for e in curves], "m": args.weight}, result)


def _cmd_kummer(args):
    curves = _parse_curves(args.curves)
    x = ProductAV(tuple(curves))
    result = _jacobian_result(x, args.weight)
    labels = ["kummer-variety"]
    if x.n == 2 and args.weight == 2:
        labels.append("singular-K3")
    result = {"labels": labels, **result}
    return ({"curves": [_curve_record(e) for e in curves], "m": args.weight}, result)


def _cmd_decompose(args):
    curves = _parse_curves(args.curves)
    x = ProductAV(tuple(curves))
    dec = jacobians.n_decompose(x)
    result = dec.to_record()
    if x.n == 2:
        report = jacobians.surface_decompose(curves[0], curves[1])
        result["surface"] = {
            "big_order": _order_record(report.big_order),
            "jacobian": _curve_record(report.jacobian),
            "primitivity_degree": report.primitivity_degree,
        }
        if curves[0].order == curves[1].order:
            result["surface"][
                "definable_over_jacobian_field"
            ] = jacobians.product_definable_over_jacobian_field(curves[0], curves[1])
    return ({"curves": [_curve_record(e) for e in curves]}, result)


def _cmd_orbit(args):
    curves = _parse_curves(args.curves)
    x = ProductAV(tuple(curves))
    orbit = jacobians.jacobian_orbit(x)
    return (
        {"curves": [_curve_record(e) for e in curves]},
        {"length": len(orbit), "orbit": [dec.to_record() for dec in orbit]},
    )


def _cmd_fixedpoint(args):
    curves = _parse_curves(args.curves)
    x = ProductAV(tuple(curves))
    return (
        {"curves": [_curve_record(e) for e in curves]},
        {
            "fixed_point": jacobians.is_fixed_point(x),
            "decomposition": jacobians.n_decompose(x).to_record(),
        },
    )


def _cmd_fod(args):
    curves = _parse_curves(args.curves)
    if len(curves) != 2:
        raise ParseError("fod needs exactly two curve classes")
    e1, e2 = curves
    if e1.order == e2.order:
        result = {
            "mode": "same-order",
            "same_field_of_definition": jacobians.same_field_of_definition(e1, e2),
            "product_definable_over_jacobian_field": (
                jacobians.product_definable_over_jacobian_field(e1, e2)
            ),
        }
    else:
        if e1.field != e2.field:
            raise ParseError("fod needs curves over one imaginary quadratic field")
        f1, f2 = e1.conductor, e2.conductor
        contains = None
        if f2 % f1 == 0:
            contains = jacobians.field_contains(e1, e2)
        elif f1 % f2 == 0:
            contains = jacobians.field_contains(e2, e1)
        result = {
            "mode": "phi-transfer",
            "field_of_smaller_contained_in_larger": contains,
        }
    return ({"curves": [_curve_record(e) for e in curves]}, result)


def _cmd_jinv(args):
    _check_prec(args)
    lats = _parse_lattices(args.lattices)
    if len(lats) != 1:
        raise ParseError("jinv needs exactly one lattice")
    lat = lats[0]
    value = analytic.j_of_lattice(lat, args.prec)
    order, form = cmlattice.ideal_class(lat)
    tau = analytic.fundamental_domain_exact(lat.tau)
    return (
        {"lattice": str(lat), "prec": args.prec},
        {
            "re": _mpf_str(value.re, args.prec),
            "im": _mpf_str(value.im, args.prec),
            "prec": args.prec,
            "fundamental_tau": str(tau),
            "order": _order_record(order),
            "class": list(form.as_tuple()),
        },
    )


def _cmd_hcp(args):
    _check_prec(args)
    D = validate_discriminant(args.discriminant)
    cache = _open_cache(args)
    hit = cache.hcp(D, args.prec) if cache else None
    if hit:
        coeffs = [int(c) for c in hit["hcp"]]
    else:
        poly = analytic.hilbert_class_polynomial(D, args.prec)
        coeffs = list(poly.coefficients)
        if cache:
            group = binforms.class_group(D)
            cache.put(
                {
                    "D": D,
                    "forms": [list(f.as_tuple()) for f in group.elements],
                    "structure": list(group.structure),
                    "hcp": coeffs,
                    "prec": args.prec,
                }
            )
    return (
        {"D": D, "prec": args.prec},
        {"D": D, "degree": len(coeffs) - 1, "coefficients": coeffs, "prec": args.prec},
    )


def _cmd_hodge(args):
    if (args.data is None) == (args.abelian is None):
        raise ParseError("hodge needs exactly one of --data or --abelian")
    if args.data is not None:
        h = hodgecalc.parse_hodge(args.data)
        echo = {"data": str(h)}
    else:
        try:
            n, m = (int(p) for p in args.abelian.split(","))
        except ValueError as exc:
            raise ParseError("--abelian expects 'n,m'") from exc
        h = hodgecalc.abelian_product_hodge(n, m)
        echo = {"abelian": [n, m]}
    delta = hodgecalc.discrepancy(h)
    result = {
        "weight": h.weight,
        "hodge_numbers": list(h.numbers),
        "rank_image": h.rank_image,
        "delta": delta,
        "has_jacobian": hodgecalc.has_jacobian(h),
        "torsion_dim_any_prime": hodgecalc.torsion_dim(h, 2),
        "kernel_rank": h.total_rank - h.rank_image,
    }
    if delta == 0 and h.weight > 0:
        head, rest = hodgecalc.split_h0(h)
        result["split"] = {"h0_part": str(head), "complement": str(rest)}
    if args.abelian is not None and h.weight == 2:
        result["ns_rank"] = h.total_rank - h.rank_image
    return (echo, result)


def _cmd_verify_appendix(args):
    _check_prec(args)
    fixtures = analytic.verify_appendix(args.prec)
    all_ok = all(r["matches_exact_value"] and r["reality_matches_class_order"] for r in fixtures)
    return (
        {"prec": args.prec},
        {"prec": args.prec, "fixtures": fixtures, "all_ok": all_ok},
    )


_COMMANDS = {
    "classgroup": _cmd_classgroup,
    "reduce": _cmd_reduce,
    "compose": _cmd_compose,
    "latprod": _cmd_latprod,
    "homothety": _cmd_homothety,
    "endring": _cmd_endring,
    "jacobian": _cmd_jacobian,
    "decompose": _cmd_decompose,
    "orbit": _cmd_orbit,
    "fixedpoint": _cmd_fixedpoint,
    "fod": _cmd_fod,
    "jinv": _cmd_jinv,
    "hcp": _cmd_hcp,
    "hodge": _cmd_hodge,
    "kummer": _cmd_kummer,
    "verify-appendix": _cmd_verify_appendix,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weightjac",
        description="Class groups, CM lattice products, higher-weight Jacobians, "
        "and exact j-invariant verification; JSON report on stdout.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, curves=False, lattices=False, weight=False, prec=False, disc=False):
        p.add_argument("--cache", help="cache file path (overrides WJ_CACHE)")
        p.add_argument("--json", action="store_true", help="JSON output (the default)")
        if disc:
            p.add_argument("-D", "--discriminant", type=int, required=True)
        if curves:
            p.add_argument("--curves", required=True, help="'(D:a,b,c),(D:a,b,c),...'")
        if lattices:
            p.add_argument("--lattices", required=True, help="'<g1;g2>@d,...'")
        if weight:
            p.add_argument("-m", "--weight", type=int, default=2)
        if prec:
            p.add_argument("--prec", type=int, default=128, help="precision in bits")

    common(sub.add_parser("classgroup", help="reduced forms and group structure"), disc=True)
    p = sub.add_parser("reduce", help="reduce a binary quadratic form")
    common(p)
    p.add_argument("--form", required=True, help="'a,b,c'")
    p = sub.add_parser("compose", help="Gauss composition of two forms")
    common(p)
    p.add_argument("--forms", required=True, help="'a,b,c;a,b,c'")
    common(sub.add_parser("latprod", help="lattice product"), lattices=True)
    common(sub.add_parser("homothety", help="homothety test"), lattices=True)
    common(sub.add_parser("endring", help="endomorphism order of a lattice"), lattices=True)
    common(sub.add_parser("jacobian", help="weight-m Jacobian of a product"), curves=True, weight=True)
    common(sub.add_parser("kummer", help="Jacobian of the Kummer variety"), curves=True, weight=True)
    common(sub.add_parser("decompose", help="canonical decomposition"), curves=True)
    common(sub.add_parser("orbit", help="orbit under the (n-1)-Jacobian"), curves=True)
    common(sub.add_parser("fixedpoint", help="is X isomorphic to its (n-1)-Jacobian"), curves=True)
    common(sub.add_parser("fod", help="field-of-definition predicates"), curves=True)
    common(sub.add_parser("jinv", help="j-invariant of a lattice"), lattices=True, prec=True)
    common(sub.add_parser("hcp", help="Hilbert class polynomial"), disc=True, prec=True)
    p = sub.add_parser("hodge", help="synthetic Hodge calculus")
    common(p)
    p.add_argument("--data", help="'weight m; h = [...]; rankL = k'")
    p.add_argument("--abelian", help="'n,m' for the 2-maximal product structure")
    common(sub.add_parser("verify-appendix", help="check all golden j-values"), prec=True)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return 0
        record = {
            "schema": SCHEMA,
            "command": argv[0] if argv else None,
            "error": {"type": "UsageError", "message": "invalid arguments"},
        }
        print(json.dumps(record, indent=2))
        return 2
    started = time.monotonic()
    try:
        echo, result = _COMMANDS[args.command](args)
    except WeightjacError as exc:
        record = {
            "schema": SCHEMA,
            "command": args.command,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        print(json.dumps(record, indent=2))
        return 2
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "input": echo,
        "result": result,
        "timings": {"total_ms": int((time.monotonic() - started) * 1000)},
    }
    print(json.dumps(report, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
