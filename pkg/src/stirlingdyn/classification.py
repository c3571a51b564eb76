"""Fixed-point and critical-point extraction and classification.

Multiplier thresholds (all paper-scale cases sit at 0, 1/2 or 1, so these are
generous relative to root-finder residuals):

    superattracting        |m| < 1e-8
    attracting             |m| < 1 - 1e-8
    indifferent            ||m| - 1| <= 1e-8
    rationally indifferent indifferent and |m**q - 1| < 1e-6 for some q <= 64
    repelling              |m| > 1 + 1e-8
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .polynomial import ComplexPolynomial, RootSet, _eval_scale
from .rational import (INFINITY, Indeterminate, RationalMap, SpherePoint,
                       conjugate_reciprocal, is_infinite)

SUPER_TOL = 1e-8
INDIFFERENT_TOL = 1e-8
PARABOLIC_ROOT_TOL = 1e-6
MAX_PARABOLIC_ORDER = 64
MATCH_TOL = 1e-6   # "is this point one of the zeroes of f"

SUPERATTRACTING = "superattracting"
ATTRACTING = "attracting"
RATIONALLY_INDIFFERENT = "rationally_indifferent"
INDIFFERENT_UNRESOLVED = "indifferent_unresolved"
REPELLING = "repelling"


@dataclass(frozen=True)
class FixedPointReport:
    location: SpherePoint
    multiplier: complex
    multiplicity: int
    classification: str
    extraneous: bool
    parabolic_order: int | None = None

    @property
    def is_infinite(self) -> bool:
        return is_infinite(self.location)


@dataclass(frozen=True)
class FatouCensus:
    """Fatou-Shishikura bookkeeping: counted fixed points bound Herman rings."""

    d: int
    n_AB_lower: int
    n_PB_lower: int
    herman_upper: int


def classify_multiplier(m: complex) -> tuple[str, int | None]:
    am = abs(m)
    if am < SUPER_TOL:
        return SUPERATTRACTING, None
    if abs(am - 1.0) <= INDIFFERENT_TOL:
        for q in range(1, MAX_PARABOLIC_ORDER + 1):
            if abs(m ** q - 1.0) < PARABOLIC_ROOT_TOL:
                return RATIONALLY_INDIFFERENT, q
        return INDIFFERENT_UNRESOLVED, None
    if am < 1.0:
        return ATTRACTING, None
    return REPELLING, None


def _multiplier_at(f: RationalMap, z: complex,
                   df: RationalMap | None = None) -> complex:
    """f'(z), with a circular-stencil fallback where the symbolic pair is 0/0."""
    if df is None:
        df = f.derivative_map()
    dv = df.den(z)
    if dv != 0:
        m = df.num(z) / dv
        if np.isfinite(m.real) and np.isfinite(m.imag):
            return m
    # shared near-vanishing factor in num and den: differentiate the map values
    h = 1e-3 * (1.0 + abs(z))
    pts = 8
    acc = 0j
    for j in range(pts):
        w = np.exp(2j * np.pi * j / pts)
        acc += f(z + h * w) * np.conj(w)
    return acc / (pts * h)


def fixed_points(f: RationalMap,
                 zeroes_of_f: tuple[complex, ...] | None = None,
                 multiplier_fn=None) -> list[FixedPointReport]:
    """All fixed points of the map, finite ones first (sorted by re, im).

    Finite fixed points are the roots of num - z*den, with multiplicity read
    off that polynomial.  The point at infinity is appended when the
    reciprocal chart fixes 0.  The extraneous flag requires knowing the
    zeroes of the underlying function; with zeroes_of_f=None it stays False.

    multiplier_fn, when given, evaluates the map's derivative pointwise
    (e.g. the analytic step derivative built from the original low-degree
    input); it keeps full accuracy when the expanded coefficient pair is
    ill-conditioned.
    """
    fp_poly = f.num - ComplexPolynomial([0.0, 1.0]) * f.den
    reports: list[FixedPointReport] = []
    # constant nonzero difference: no finite fixed points; zero difference:
    # the identity map, whose finite fixed points are not enumerable
    if fp_poly.degree() >= 1:
        df = f.derivative_map()
        for loc, mult in fp_poly.roots().roots:
            m = None
            if multiplier_fn is not None:
                try:
                    m = complex(multiplier_fn(loc))
                except ArithmeticError:
                    m = None
            if m is None or not (np.isfinite(m.real) and np.isfinite(m.imag)):
                m = _multiplier_at(f, loc, df)
            cls, order = classify_multiplier(m)
            extraneous = False
            if zeroes_of_f is not None:
                extraneous = all(abs(loc - r) > MATCH_TOL for r in zeroes_of_f)
            reports.append(FixedPointReport(loc, m, mult, cls, extraneous, order))
    reports.sort(key=lambda r: (r.location.real, r.location.imag))
    inf_report = classify_infinity(f)
    if inf_report is not None:
        reports.append(inf_report)
    return reports


def stirling_fixed_points(p: ComplexPolynomial,
                          q: ComplexPolynomial | None = None,
                          multiplier_fn=None) -> list[FixedPointReport]:
    """Fixed points of the Stirling map of P/Q from its factored structure.

    The fixed-point polynomial of the assembled map factors exactly as
    P * Qk^2 * Q**e (zeroes of P; deflection-type extraneous points, each of
    multiplicity 2; poles of P/Q when the degree gap exceeds 2).  Reading
    locations off these low-degree factors keeps full accuracy where the
    expanded map pair is hopelessly ill-conditioned; multipliers default to
    the analytic step derivative on the same low-degree data.
    """
    from .iterators import MapSpec, stirling_rational_parts, stirling_step_derivative

    if q is None:
        q = ComplexPolynomial([1.0])
    parts = stirling_rational_parts(p, q)
    built = parts.map
    if multiplier_fn is None:
        spec = MapSpec(kind="rational", num=tuple(p.coeffs.tolist()),
                       den=tuple(q.coeffs.tolist()))
        multiplier_fn = lambda z: stirling_step_derivative(spec, z)  # noqa: E731
    df = built.derivative_map()
    reports: list[FixedPointReport] = []

    def add(loc: complex, mult: int, extraneous: bool) -> None:
        m = None
        try:
            m = complex(multiplier_fn(loc))
        except ArithmeticError:
            m = None
        if m is None or not (np.isfinite(m.real) and np.isfinite(m.imag)):
            m = _multiplier_at(built, loc, df)
        cls, order = classify_multiplier(m)
        reports.append(FixedPointReport(loc, m, mult, cls, extraneous, order))

    if p.degree() >= 1:
        for loc, mult in p.roots().roots:
            add(loc, mult, False)
    if parts.q_of_k.degree() >= 1:
        for loc, mult in parts.q_of_k.roots().roots:
            add(loc, 2 * mult, True)
    if parts.q_exponent >= 1 and q.degree() >= 1:
        for loc, mult in q.roots().roots:
            add(loc, parts.q_exponent * mult, True)
    reports.sort(key=lambda r: (r.location.real, r.location.imag))
    inf_report = classify_infinity(built)
    if inf_report is not None:
        reports.append(inf_report)
    return reports


def classify_infinity(f: RationalMap) -> FixedPointReport | None:
    """Report for the fixed point at infinity, or None when it is not fixed.

    Infinity is fixed exactly when deg num > deg den (a structural fact of
    the trimmed pair).  In the reciprocal chart g(w) = 1/f(1/w) the
    multiplier g'(0) reduces to the coefficient ratio den[d-1]/num[d] with
    d = deg num -- no polynomial evaluation and hence no cancellation.
    Infinity is conventionally not flagged extraneous (the flag tracks
    *finite* non-root fixed points).
    """
    if f.num.is_zero:
        return None
    dn = int(f.num.degree())
    dd = f.den.degree()
    if dn <= dd:
        return None
    if dd >= dn - 1:
        m = complex(f.den.coeffs[dn - 1] / f.num.coeffs[dn])
    else:
        m = 0j
    cls, order = classify_multiplier(m)
    # multiplicity of w=0 as a root of num_g(w) - w*den_g(w) in the chart
    g = conjugate_reciprocal(f)
    diff = g.num - ComplexPolynomial([0.0, 1.0]) * g.den
    mult = 1
    if not diff.is_zero:
        scale = float(np.abs(diff.coeffs).max())
        mult = 0
        while mult < diff.coeffs.size and abs(diff.coeffs[mult]) <= 1e-9 * scale:
            mult += 1
        mult = max(mult, 1)
    return FixedPointReport(INFINITY, m, mult, cls, False, order)


def critical_points(f: RationalMap) -> RootSet:
    """Finite critical points: roots of the numerator of f'."""
    if f.degree() < 1:
        raise ValueError("need a nonconstant map")
    w = f.derivative_map().num
    if w.degree() < 1:
        return RootSet((), 0.0)
    return w.roots()


def infinity_critical_multiplicity(f: RationalMap) -> int:
    """local degree of f at infinity, minus one (0 when infinity is regular)."""
    from .rational import reversed_poly  # local import keeps module load light

    v = f.eval_sphere(INFINITY)
    if is_infinite(v):
        # infinity fixed: the local degree is exactly deg num - deg den
        return int(f.num.degree()) - int(f.den.degree()) - 1
    d = int(max(f.num.degree(), f.den.degree()))
    coeffs = (reversed_poly(f.num, d) -
              ComplexPolynomial([v]) * reversed_poly(f.den, d)).coeffs
    if len(coeffs) == 0:
        return 0
    scale = float(np.abs(coeffs).max())
    ord0 = 0
    while ord0 < len(coeffs) and abs(coeffs[ord0]) <= 1e-9 * scale:
        ord0 += 1
    return max(ord0 - 1, 0)


@dataclass(frozen=True)
class CriticalCensus:
    finite: RootSet
    infinity_multiplicity: int
    expected_total: int

    @property
    def total(self) -> int:
        return self.finite.total_multiplicity() + self.infinity_multiplicity


def critical_census(f: RationalMap) -> CriticalCensus:
    """Finite critical points plus the contribution of infinity vs 2d - 2."""
    return CriticalCensus(critical_points(f), infinity_critical_multiplicity(f),
                          2 * f.degree() - 2)


def free_critical_points(f: RationalMap,
                         zeroes_of_f: tuple[complex, ...]) -> list[complex]:
    """Critical points farther than MATCH_TOL from every zero of f."""
    out = [loc for loc in critical_points(f).locations
           if all(abs(loc - r) > MATCH_TOL for r in zeroes_of_f)]
    out.sort(key=lambda z: (z.real, z.imag))
    return out


def herman_ring_bound(reports: list[FixedPointReport], d: int) -> FatouCensus:
    """floor((2d - 2 - n_AB - n_PB)/2), floored at zero.

    n_AB counts (super)attracting fixed points, n_PB rationally indifferent
    ones; each of the latter guarantees at least one parabolic cycle.
    """
    n_ab = sum(1 for r in reports if r.classification in (SUPERATTRACTING, ATTRACTING))
    n_pb = sum(1 for r in reports if r.classification == RATIONALLY_INDIFFERENT)
    herman = max((2 * d - 2 - n_ab - n_pb) // 2, 0)
    return FatouCensus(d, n_ab, n_pb, herman)


def pole_shifted_extraneous_multiplier(p: ComplexPolynomial, q: ComplexPolynomial,
                                       pole: complex) -> complex:
    """Predicted Stirling multiplier at a simple pole of P/Q when deg P = deg Q + 3.

    For deg P - deg Q >= 3 the poles of P/Q are themselves fixed points of
    the Stirling map (the step P/Q / (P/Q)'(z - P/Q) vanishes there), a
    family the rationally-indifferent law does not cover.  At the degree gap
    of exactly 3 with a simple pole the multiplier has the closed form
    1 - 1/(3*L*A) with L the leading-coefficient ratio and A the residue-like
    ratio P(pole)/Q'(pole).
    """
    n, m = int(p.degree()), int(q.degree())
    if n - m != 3:
        raise ValueError("closed form covers a degree gap of exactly 3")
    lead_ratio = p.leading / q.leading
    a = p(pole) / q.derivative()(pole)
    return 1.0 - 1.0 / (3.0 * lead_ratio * a)


def theorem_extraneous_residual(p: ComplexPolynomial, q: ComplexPolynomial,
                                z: complex) -> float:
    """|Q(z - P(z)/Q(z))|: zero exactly at the deflection-type extraneous points."""
    qv = q(z)
    if qv == 0:
        return math.inf
    k = z - p(z) / qv
    return abs(q(k))
