"""Command-line surface: analyze, render, orbit, verify, compare.

Map specs are JSON documents; complex numbers are [re, im] pairs (bare
numbers are accepted and read as reals).  Exit codes: 0 success, 1 spec or
usage errors, 2 root-finder non-convergence, 3 image output failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import classification, verify
from .classification import (critical_census, fixed_points, free_critical_points,
                             herman_ring_bound, stirling_fixed_points,
                             theorem_extraneous_residual)
from .dynamics import (ESCAPED, UNDETERMINED, AttractorTable, classify_grid,
                       iterate_orbit)
from .iterators import (InvalidMobius, InvalidParameters, MapSpec, build_map,
                        build_newton, step_derivative_numeric)
from .polynomial import ComplexPolynomial, NonConvergence
from .rational import Indeterminate, is_infinite
from .render import IoFailure, Palette, write_png, write_ppm


class SpecError(ValueError):
    """Malformed or invalid map-spec document."""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 on usage errors, not argparse's 2
        raise _UsageError(message)


# -- map-spec files -----------------------------------------------------------


def _as_complex(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise SpecError(f"{where}: expected a number or [re, im] pair, got {value!r}")


def _as_coeff_list(value, where: str) -> tuple[complex, ...]:
    if not isinstance(value, list) or not value:
        raise SpecError(f"{where}: expected a non-empty coefficient list")
    return tuple(_as_complex(v, f"{where}[{i}]") for i, v in enumerate(value))


def load_map_spec(path: str) -> MapSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecError(f"{path}: top level must be an object")
    kind = doc.get("kind")
    method = doc.get("method", "stirling")
    try:
        if kind == "polynomial":
            spec = MapSpec(kind=kind, method=method,
                           coefficients=_as_coeff_list(doc.get("coefficients"),
                                                       "coefficients"))
        elif kind == "rational":
            spec = MapSpec(kind=kind, method=method,
                           num=_as_coeff_list(doc.get("num"), "num"),
                           den=_as_coeff_list(doc.get("den"), "den"))
        elif kind == "mobius":
            spec = MapSpec(kind=kind, method=method,
                           a=_as_complex(doc.get("a", 0), "a"),
                           b=_as_complex(doc.get("b", 0), "b"),
                           c=_as_complex(doc.get("c", 0), "c"),
                           d=_as_complex(doc.get("d", 0), "d"))
        elif kind == "unicritical":
            spec = MapSpec(kind=kind, method=method,
                           lam=_as_complex(doc.get("lambda", 0), "lambda"),
                           alpha=_as_complex(doc.get("alpha", 0), "alpha"),
                           beta=_as_complex(doc.get("beta", 0), "beta"))
        else:
            raise SpecError(f"{path}: unknown kind {kind!r}")
        spec.validate()
    except (InvalidMobius, InvalidParameters, ValueError) as exc:
        raise SpecError(f"{path}: {exc}") from exc
    return spec


def spec_zeroes(spec: MapSpec) -> tuple[complex, ...]:
    """Zeroes of the underlying function f, for extraneous-point flagging."""
    num, _den = spec.function_pair()
    if spec.kind == "mobius":
        return () if spec.a == 0 else (-spec.b / spec.a,)
    if num.degree() < 1:
        return ()
    return num.roots().locations


# -- JSON report --------------------------------------------------------------


def _jc(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _jloc(loc) -> object:
    return "infinity" if is_infinite(loc) else _jc(loc)


def _spec_reports(spec: MapSpec, built):
    """Fixed-point reports, through the structured path for Stirling specs."""
    if spec.method == "stirling":
        num, den = spec.function_pair()
        return stirling_fixed_points(num, den)
    return fixed_points(built, zeroes_of_f=spec_zeroes(spec),
                        multiplier_fn=lambda z: step_derivative_numeric(spec, z))


def analysis_document(spec: MapSpec) -> dict:
    built = build_map(spec)
    zeroes = spec_zeroes(spec)
    reports = _spec_reports(spec, built)
    census = critical_census(built)
    free = free_critical_points(built, zeroes)
    fatou = herman_ring_bound(reports, built.degree())
    norm = built.normalized()

    notes: list[str] = []
    if spec.kind == "polynomial":
        notes.append("polynomial input: rotation annuli cannot occur; "
                     "herman_upper is only the census bound")
    if spec.kind == "mobius" and spec.a == 0:
        notes.append("input has no zeroes; every finite fixed point is extraneous")
    if spec.kind == "rational":
        p, q = spec.function_pair()
        for r in reports:
            if r.extraneous and not is_infinite(r.location):
                if (theorem_extraneous_residual(p, q, r.location) > 1e-3
                        and abs(q(r.location)) < 1e-6):
                    notes.append(
                        f"extraneous fixed point at {r.location!r} sits on a pole "
                        "of P/Q (degree gap >= 3): outside the rationally-"
                        "indifferent law for deflection-type points")
        audit = built.common_root_audit()
        if audit:
            notes.append(f"common-root audit flagged {len(audit)} point(s): "
                         + ", ".join(repr(z) for z in audit))
    if census.total != census.expected_total:
        notes.append(f"critical point count {census.total} differs from "
                     f"2*deg-2 = {census.expected_total}")

    return {
        "map": {"kind": spec.kind, "method": spec.method},
        "degree": built.degree(),
        "coefficients": {"num": [_jc(c) for c in norm.num.coeffs],
                         "den": [_jc(c) for c in norm.den.coeffs]},
        "fixed_points": [{
            "location": _jloc(r.location),
            "multiplier": _jc(r.multiplier),
            "multiplicity": r.multiplicity,
            "class": r.classification,
            "parabolic_order": r.parabolic_order,
            "extraneous": r.extraneous,
        } for r in reports],
        "critical_points": [{"location": _jc(loc), "multiplicity": mult}
                            for loc, mult in census.finite.roots],
        "critical_point_count": {"finite": census.finite.total_multiplicity(),
                                 "infinity": census.infinity_multiplicity,
                                 "total": census.total,
                                 "expected": census.expected_total},
        "free_critical_points": [_jc(z) for z in free],
        "fatou_census": {"degree": fatou.d, "n_AB_lower": fatou.n_AB_lower,
                         "n_PB_lower": fatou.n_PB_lower,
                         "herman_upper": fatou.herman_upper},
        "notes": notes,
    }


def _attractor_table(spec: MapSpec):
    built = build_map(spec)
    return built, AttractorTable.from_reports(_spec_reports(spec, built))


# -- text helpers -------------------------------------------------------------


def _ct(z: complex) -> str:
    return f"{z.real:.10g}{z.imag:+.10g}j"


def _loc_text(loc) -> str:
    return "infinity" if is_infinite(loc) else _ct(loc)


# -- commands -----------------------------------------------------------------


def cmd_analyze(args) -> int:
    spec = load_map_spec(args.map)
    doc = analysis_document(spec)
    text = json.dumps(doc, indent=2) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def _parse_center(text: str) -> complex:
    try:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError as exc:
        raise SpecError(f"--center expects RE,IM, got {text!r}") from exc


def _parse_resolution(text: str) -> tuple[int, int]:
    try:
        w_s, h_s = text.lower().split("x")
        w, h = int(w_s), int(h_s)
    except ValueError as exc:
        raise SpecError(f"--resolution expects WxH, got {text!r}") from exc
    if w < 1 or h < 1:
        raise SpecError("resolution must be at least 1x1")
    return w, h


def cmd_render(args) -> int:
    out = args.out
    writer = {"png": write_png, "ppm": write_ppm}.get(out.lower().rsplit(".", 1)[-1])
    if writer is None:
        raise SpecError(f"--out must end in .ppm or .png, got {out!r}")
    spec = load_map_spec(args.map)
    built, table = _attractor_table(spec)
    resolution = _parse_resolution(args.resolution)
    raster = classify_grid(built, table, (_parse_center(args.center), args.width),
                           resolution, max_iter=args.max_iter)
    palette = Palette.for_attractors(table, args.max_iter)
    writer(raster, palette, out)
    for i, (loc, cls) in enumerate(table.entries):
        print(f"attractor {i}: {_loc_text(loc)} ({cls})")
    print(f"wrote {out}")
    return 0


def cmd_orbit(args) -> int:
    spec = load_map_spec(args.map)
    built, table = _attractor_table(spec)
    start = _parse_center(args.start)
    result = iterate_orbit(built, start, table, args.iters)
    if args.json:
        doc = {"start": _jc(start),
               "status": result.status,
               "attractor_index": result.attractor_index,
               "iterations": result.iterations,
               "iterates": [_jc(z) for z in result.iterates]}
        print(json.dumps(doc, indent=2))
        return 0
    print(f"{'k':>5}  {'re':>24}  {'im':>24}  {'|step|':>12}")
    prev = None
    for k, z in enumerate(result.iterates):
        step = "" if prev is None else f"{abs(z - prev):.6e}"
        print(f"{k:>5}  {z.real:+.16e}  {z.imag:+.16e}  {step:>12}")
        prev = z
    target = ""
    if result.attractor_index is not None:
        loc, cls = table.entries[result.attractor_index]
        target = f" -> attractor {result.attractor_index} at {_loc_text(loc)} ({cls})"
    print(f"verdict: {result.status} after {result.iterations} iterations{target}")
    return 0


def cmd_verify(args) -> int:
    reports = verify.run_suite(args.suite)
    failed = [r for r in reports if not r.passed]
    if args.json:
        print(json.dumps({"suite": args.suite,
                          "passed": not failed,
                          "reports": [r.to_dict() for r in reports]}, indent=2))
    else:
        for r in reports:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}")
            if not r.passed:
                for w in r.witnesses:
                    print(f"      {w.label}: expected {w.expected}, "
                          f"observed {w.observed} (tol {w.tolerance:g})")
    return 0 if not failed else 1


def _classification_of(reports, predicate) -> list:
    return [r for r in reports if predicate(r)]


def _compare_rows(spec: MapSpec) -> list[tuple[str, str, str]]:
    if spec.kind not in ("polynomial", "mobius"):
        raise SpecError("compare supports polynomial and mobius specs")
    num, den = spec.function_pair()
    zeroes = spec_zeroes(spec)
    stirling = build_map(MapSpec(**{**spec.__dict__, "method": "stirling"}))
    newton = build_newton(num, den if den.degree() >= 1 else None)
    st_reports = fixed_points(stirling, zeroes_of_f=zeroes)
    nw_reports = fixed_points(newton, zeroes_of_f=zeroes)

    def zero_cell(reports):
        if not zeroes:
            return "no zeroes"
        cells = []
        for z in zeroes:
            r = min(reports, key=lambda r: abs(r.location - z)
                    if not is_infinite(r.location) else np.inf)
            cells.append(f"{_ct(z)}: {r.classification}")
        return "; ".join(cells)

    def inf_cell(reports):
        for r in reports:
            if is_infinite(r.location):
                return f"{r.classification} (multiplier {_ct(r.multiplier)})"
        return "not fixed"

    def extraneous_cell(reports):
        ext = [r for r in reports if r.extraneous and not is_infinite(r.location)]
        if not ext:
            return "none"
        return "; ".join(f"{_ct(r.location)}: {r.classification}" for r in ext)

    def parabolic_cell(reports):
        n = sum(1 for r in reports
                if r.classification == classification.RATIONALLY_INDIFFERENT)
        return f"{n} rationally indifferent fixed point(s)"

    def siegel_cell(reports):
        n = sum(1 for r in reports
                if r.classification == classification.INDIFFERENT_UNRESOLVED)
        return "none found" if n == 0 else f"{n} unresolved indifferent point(s)"

    rows = [
        ("order of the method", "2", "2"),
        ("degree of the iteration map", str(newton.degree()), str(stirling.degree())),
        ("zeroes of f", zero_cell(nw_reports), zero_cell(st_reports)),
        ("fixed point at infinity", inf_cell(nw_reports), inf_cell(st_reports)),
        ("extraneous fixed points", extraneous_cell(nw_reports),
         extraneous_cell(st_reports)),
        ("invariant parabolic domains", parabolic_cell(nw_reports),
         parabolic_cell(st_reports)),
        ("invariant Siegel discs", siegel_cell(nw_reports), siegel_cell(st_reports)),
    ]
    if spec.kind == "polynomial":
        f_poly = num
        a, b, lam = 2.0 + 0j, 0.5 + 0j, 1.3 + 0j
        st_scaling = verify.scaling_check(f_poly, a, b, lam)
        newton_gap = _newton_scaling_gap(f_poly, a, b, lam)
        rows.insert(1, ("affine rescaling invariance",
                        f"holds (conjugation gap {newton_gap:.2e})",
                        "fails for a*lam != 1 (witnessed)" if st_scaling.passed
                        else "unexpected scaling behaviour"))
        rows.append(("Julia set connectivity",
                     "connected (cited result, not computed)",
                     "connected (cited result, not computed)"))
    return rows


def _newton_scaling_gap(f: ComplexPolynomial, a: complex, b: complex,
                        lam: complex) -> float:
    from .rational import affine_conjugate
    g = f.compose(ComplexPolynomial([b, a])).scale(lam)
    conj = affine_conjugate(build_newton(g), a, b)
    return verify.map_coefficient_distance(conj, build_newton(f))


def cmd_compare(args) -> int:
    spec = load_map_spec(args.spec)
    rows = _compare_rows(spec)
    w0 = max(len(r[0]) for r in rows)
    w1 = max(len(r[1]) for r in rows) if rows else 10
    print(f"{'property':<{w0}}  {'newton':<{w1}}  stirling")
    print("-" * (w0 + w1 + 12))
    for name, nw, st in rows:
        print(f"{name:<{w0}}  {nw:<{w1}}  {st}")
    if spec.kind == "mobius":
        print()
        print("note: for a Moebius input the Newton map is a polynomial of "
              "degree <= 2, so its fixed point at infinity is attracting or "
              "superattracting; the repelling fixed point is the finite "
              "extraneous one at -d/c.")
    return 0


# -- entry point ----------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="stirlingdyn",
                     description="Stirling iteration maps: analysis, orbits, "
                                 "basin rendering, theorem checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="write a JSON analysis report")
    p.add_argument("--map", required=True, help="map-spec JSON path")
    p.add_argument("--out", default="-", help="output path or - for stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("render", help="render basins of attraction to an image")
    p.add_argument("--map", required=True)
    p.add_argument("--center", default="0,0", help="viewport center RE,IM")
    p.add_argument("--width", type=float, default=6.0,
                   help="viewport width along the real axis")
    p.add_argument("--resolution", default="800x600", help="pixels, WxH")
    p.add_argument("--max-iter", type=int, default=200, dest="max_iter")
    p.add_argument("--out", required=True, help="output image (.ppm or .png)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("orbit", help="print an orbit trace and its verdict")
    p.add_argument("--map", required=True)
    p.add_argument("--start", required=True, help="starting point RE,IM")
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=list(verify.SUITES))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="Newton vs Stirling side-by-side")
    p.add_argument("--spec", required=True, help="map-spec JSON (polynomial or mobius)")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (SpecError, InvalidMobius, InvalidParameters) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NonConvergence as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return 2
    except Indeterminate as exc:
        print(f"indeterminate evaluation: {exc}", file=sys.stderr)
        return 2
    except IoFailure as exc:
        print(f"io failure: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())
