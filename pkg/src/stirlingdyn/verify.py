"""Executable checks for the dynamical facts the package is built around.

Every check returns a VerificationReport carrying witnesses (input, expected,
observed, tolerance); failed reports always carry at least one witness.
Checks are independent and deterministic; suites aggregate them sorted by
name, so ordering never depends on execution order.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .classification import (RATIONALLY_INDIFFERENT, SUPERATTRACTING,
                             critical_census, fixed_points, free_critical_points,
                             herman_ring_bound, pole_shifted_extraneous_multiplier,
                             theorem_extraneous_residual)
from .dynamics import AttractorTable, classify_grid, conjugate_flip, \
    conjugation_permutation
from .iterators import (MapSpec, build_stirling_mobius, build_stirling_polynomial,
                        build_stirling_rational, build_stirling_unicritical,
                        stirling_step_numeric)
from .polynomial import ComplexPolynomial
from .rational import (RationalMap, affine_conjugate, is_infinite,
                       stencil_derivative)

_X = ComplexPolynomial([0.0, 1.0])

SCALING_IDENTITY_TOL = 1e-9
SCALING_EQUALITY_TOL = 1e-10
SYMMETRY_POINT_TOL = 1e-10
REPEATED_ZERO_TOL = 1e-4


class NotRealCoefficients(ValueError):
    """symmetry_check requires a map with real coefficients."""


class DegenerateBeta(ValueError):
    """beta = 1/4 makes a free critical point collide with a pole of the map."""


@dataclass(frozen=True)
class Witness:
    label: str
    expected: str
    observed: str
    tolerance: float

    def to_dict(self) -> dict:
        return {"label": self.label, "expected": self.expected,
                "observed": self.observed, "tolerance": self.tolerance}


@dataclass(frozen=True)
class VerificationReport:
    name: str
    passed: bool
    witnesses: tuple[Witness, ...]

    def __post_init__(self):
        if not self.passed and not self.witnesses:
            raise ValueError("a failing report must carry at least one witness")

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "witnesses": [w.to_dict() for w in self.witnesses]}


def map_coefficient_distance(f1: RationalMap, f2: RationalMap) -> float:
    """Max relative coefficient gap between two maps after normalization."""
    a, b = f1.normalized(), f2.normalized()

    def gap(p, q):
        n = max(p.coeffs.size, q.coeffs.size)
        pa = np.zeros(n, np.complex128)
        qa = np.zeros(n, np.complex128)
        pa[: p.coeffs.size] = p.coeffs
        qa[: q.coeffs.size] = q.coeffs
        scale = max(np.abs(pa).max(initial=0.0), np.abs(qa).max(initial=0.0), 1e-300)
        return float(np.abs(pa - qa).max(initial=0.0) / scale)

    return max(gap(a.num, b.num), gap(a.den, b.den))


def _fmt(z) -> str:
    if isinstance(z, complex):
        return f"{z.real:.12g}{z.imag:+.12g}j"
    return f"{z:.12g}" if isinstance(z, float) else str(z)


# -- scaling ------------------------------------------------------------------


def scaling_check(f: ComplexPolynomial, a: complex, b: complex,
                  lam: complex) -> VerificationReport:
    """Affine-rescaling behaviour of the Stirling construction.

    With g = lam * f(a z + b) and T(z) = a z + b, the conjugated map
    T o St_g o T^-1 always equals z - f / f'(z - a*lam*f) coefficient-wise;
    it equals St_f exactly when a*lam = 1.  The check verifies both facts.
    """
    if a == 0 or lam == 0:
        raise ValueError("need a != 0 and lambda != 0")
    g = f.compose(ComplexPolynomial([b, a])).scale(lam)
    conjugated = affine_conjugate(build_stirling_polynomial(g), a, b)
    d2 = f.derivative().compose(_X - f.scale(a * lam))
    closed_form = RationalMap(_X * d2 - f, d2)
    identity_gap = map_coefficient_distance(conjugated, closed_form)
    st_f_gap = map_coefficient_distance(conjugated, build_stirling_polynomial(f))
    expect_equal = abs(a * lam - 1.0) < SCALING_EQUALITY_TOL
    observed_equal = st_f_gap <= SCALING_IDENTITY_TOL
    passed = identity_gap <= SCALING_IDENTITY_TOL and observed_equal == expect_equal
    witnesses = (
        Witness(f"conjugated-vs-closed-form a={_fmt(a)} b={_fmt(b)} lam={_fmt(lam)}",
                "coefficient gap <= tol", _fmt(identity_gap), SCALING_IDENTITY_TOL),
        Witness(f"conjugated-vs-original a*lam={_fmt(a * lam)}",
                "equal" if expect_equal else "different",
                f"gap={_fmt(st_f_gap)}", SCALING_IDENTITY_TOL),
    )
    return VerificationReport("scaling_check", passed, witnesses)


# -- symmetry -----------------------------------------------------------------


def symmetry_check(f: RationalMap, samples: int = 64) -> VerificationReport:
    """Conjugation symmetry of a real-coefficient map, plus raster mirror."""
    norm = f.normalized()
    scale = max(float(np.abs(norm.num.coeffs).max(initial=0.0)),
                float(np.abs(norm.den.coeffs).max(initial=0.0)), 1e-300)
    imag = max(float(np.abs(norm.num.coeffs.imag).max(initial=0.0)),
               float(np.abs(norm.den.coeffs.imag).max(initial=0.0)))
    if imag > 1e-12 * scale:
        raise NotRealCoefficients(f"imaginary coefficient magnitude {imag:.3e}")

    rng = np.random.default_rng(0xD1CE)
    pts = rng.uniform(-3.0, 3.0, samples) + 1j * rng.uniform(-3.0, 3.0, samples)
    worst = 0.0
    for z in pts:
        z = complex(z)
        if abs(norm.den(z)) < 1e-9 * scale or abs(norm.den(z.conjugate())) < 1e-9 * scale:
            continue
        w = norm(z)
        gap = abs(norm(z.conjugate()) - w.conjugate()) / (1.0 + abs(w))
        worst = max(worst, gap)
    point_ok = worst <= SYMMETRY_POINT_TOL

    reports = fixed_points(f)
    table = AttractorTable.from_reports(reports)
    perm = conjugation_permutation(table)
    raster_ok = perm is not None
    if raster_ok:
        raster = classify_grid(f, table, (0j, 8.0), (32, 24), max_iter=60)
        mirrored = conjugate_flip(raster, perm)
        raster_ok = bool(np.array_equal(raster.indices, mirrored.indices)
                         and np.array_equal(raster.iterations, mirrored.iterations))
    witnesses = (
        Witness("pointwise F(conj z) = conj F(z)", "relative gap <= tol",
                _fmt(worst), SYMMETRY_POINT_TOL),
        Witness("raster mirror symmetry (32x24, width 8)", "exact",
                "exact" if raster_ok else "mismatch", 0.0),
    )
    return VerificationReport("symmetry_check", point_ok and raster_ok, witnesses)


# -- free critical orbits -------------------------------------------------------


def unicritical_free_criticals(beta: complex) -> tuple[complex, complex]:
    """(2 +- sqrt(2(1 - 2 beta)))/2 for the lam=1, alpha=0 quadratic."""
    s = cmath.sqrt(2.0 * (1.0 - 2.0 * beta))
    return (2.0 + s) / 2.0, (2.0 - s) / 2.0


def free_critical_orbit(beta: complex, n: int) -> tuple[list[complex], list[complex]]:
    """Length n+1 orbits of both free critical points under the beta-quadratic map.

    Raises DegenerateBeta at beta = 1/4, where a free critical point sits on
    a pole of the iteration map.
    """
    if abs(beta - 0.25) < 1e-15:
        raise DegenerateBeta("beta = 1/4 is excluded")
    f = build_stirling_unicritical(1.0, 0.0, beta)
    zp, zm = unicritical_free_criticals(beta)
    orbits = []
    for z in (zp, zm):
        orbit = [complex(z)]
        for _ in range(n):
            z = f.num(z) / f.den(z)
            orbit.append(complex(z))
        orbits.append(orbit)
    return orbits[0], orbits[1]


# -- repeated zeroes ------------------------------------------------------------


def repeated_zero_multiplier(g: ComplexPolynomial, alpha: complex,
                             n: int) -> VerificationReport:
    """Stirling multiplier at a zero of multiplicity n of f = (z-alpha)**n g.

    The multiplier is measured by a circular finite-difference stencil on the
    pointwise numeric step and recorded against the algebraically expected
    1 - 1/n (an implementer-derived value, printed alongside the observation).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if abs(g(alpha)) == 0:
        raise ValueError("g(alpha) must be nonzero")
    f = ComplexPolynomial([-alpha, 1.0]).pow(n) * g
    spec = MapSpec(kind="polynomial", coefficients=tuple(f.coeffs.tolist()))
    h = 0.02 * (1.0 + abs(alpha))
    observed = stencil_derivative(
        lambda z: stirling_step_numeric(spec, z), alpha, h)
    expected = 1.0 - 1.0 / n
    passed = abs(observed - expected) <= REPEATED_ZERO_TOL
    witness = Witness(f"multiplier at zero of multiplicity {n}",
                      _fmt(complex(expected)), _fmt(observed), REPEATED_ZERO_TOL)
    return VerificationReport("repeated_zero_multiplier", passed, (witness,))


# -- reference case suite --------------------------------------------------------


def _report(name: str, checks: list[tuple[str, str, str, float, bool]]) -> VerificationReport:
    witnesses = tuple(Witness(lbl, exp, obs, tol) for lbl, exp, obs, tol, _ in checks)
    return VerificationReport(name, all(ok for *_, ok in checks), witnesses)


def _nearest(points, target: complex):
    return min(points, key=lambda r: abs(r.location - target)
               if not is_infinite(r.location) else math.inf)


def _case_rational_simple_zero() -> VerificationReport:
    # f = (2z-1)/z: one simple zero at 1/2, one deflection-type extraneous point at 1
    p = ComplexPolynomial([-1.0, 2.0])
    q = ComplexPolynomial([0.0, 1.0])
    built = build_stirling_rational(p, q)
    z3 = q.pow(3)
    expected = RationalMap(_X * z3 - ComplexPolynomial([-1.0, 1.0]).pow(4) * p, z3)
    gap = map_coefficient_distance(built, expected)
    reports = fixed_points(built, zeroes_of_f=(0.5 + 0j,))
    at_half = _nearest(reports, 0.5 + 0j)
    at_one = _nearest(reports, 1.0 + 0j)
    checks = [
        ("coefficient identity vs closed form", "gap <= tol", _fmt(gap), 1e-10,
         gap <= 1e-10),
        ("multiplier at 1/2", "0", _fmt(at_half.multiplier), 1e-8,
         abs(at_half.multiplier) < 1e-8),
        ("multiplier at 1", "1", _fmt(at_one.multiplier), 1e-6,
         abs(at_one.multiplier - 1.0) < 1e-6),
        ("extraneous flag at 1", "True", str(at_one.extraneous), 0.0,
         at_one.extraneous),
    ]
    return _report("rational_example_(2z-1)/z", checks)


def _case_unicritical(beta: float) -> VerificationReport:
    f = build_stirling_unicritical(1.0, 0.0, beta)
    zeroes = (cmath.sqrt(-complex(beta)), -cmath.sqrt(-complex(beta)))
    reports = fixed_points(f, zeroes_of_f=zeroes)
    checks = [("degree", "3", str(f.degree()), 0.0, f.degree() == 3)]
    for z in zeroes:
        r = _nearest(reports, z)
        checks.append((f"fixed point near {_fmt(z)}", _fmt(z),
                       _fmt(r.location), 1e-10, abs(r.location - z) <= 1e-10))
        checks.append((f"superattracting at {_fmt(z)}", SUPERATTRACTING,
                       r.classification, 1e-8,
                       r.classification == SUPERATTRACTING))
    inf_report = reports[-1]
    checks.append(("infinity multiplier", "1", _fmt(inf_report.multiplier), 1e-6,
                   is_infinite(inf_report.location)
                   and abs(inf_report.multiplier - 1.0) <= 1e-6))
    expected_free = unicritical_free_criticals(beta)
    free = free_critical_points(f, zeroes)
    ok_free = len(free) == 2 and all(
        min(abs(fc - e) for fc in free) <= 1e-8 for e in expected_free)
    checks.append(("free critical points", _fmt(expected_free[0]) + ", "
                   + _fmt(expected_free[1]),
                   ", ".join(_fmt(z) for z in free), 1e-8, ok_free))
    return _report(f"unicritical_beta_{beta:g}", checks)


def _case_mobius_a_zero() -> VerificationReport:
    a, b, c, d = 0.0, 1j, 1j, 1.0
    built = build_stirling_mobius(a, b, c, d)
    generic = build_stirling_rational(ComplexPolynomial([b, a]),
                                      ComplexPolynomial([d, c]))
    gap = map_coefficient_distance(built, generic)
    reports = fixed_points(built, zeroes_of_f=())
    census = critical_census(built)
    fatou = herman_ring_bound(reports, built.degree())
    inf_report = reports[-1]
    ext = [r for r in reports if not is_infinite(r.location)]
    targets = (1 + 1j, -1 + 1j)
    ok_ext = len(ext) == 2 and all(
        min(abs(r.location - t) for r in ext) <= 1e-8 for t in targets) and all(
        abs(r.multiplier - 1.0) <= 1e-6 and r.multiplicity == 2 and r.extraneous
        for r in ext)
    checks = [
        ("degree", "4", str(built.degree()), 0.0, built.degree() == 4),
        ("closed form vs generic assembly", "gap <= tol", _fmt(gap), 1e-10,
         gap <= 1e-10),
        ("infinity multiplier", "0.5", _fmt(inf_report.multiplier), 1e-9,
         is_infinite(inf_report.location)
         and abs(inf_report.multiplier - 0.5) <= 1e-9),
        ("extraneous points i+-1, multiplicity 2, multiplier 1", "as stated",
         "; ".join(f"{_fmt(r.location)} m={_fmt(r.multiplier)} x{r.multiplicity}"
                   for r in ext), 1e-6, ok_ext),
        ("critical points including infinity", "6", str(census.total), 0.0,
         census.total == 6 and census.expected_total == 6),
        ("herman ring upper bound", "1", str(fatou.herman_upper), 0.0,
         fatou.herman_upper == 1),
    ]
    return _report("mobius_a=0_b=c=i_d=1", checks)


def _case_mobius_a_nonzero() -> VerificationReport:
    a, b, c, d = 1.0, 0.0, 1.0, 1.0
    built = build_stirling_mobius(a, b, c, d)
    cube = ComplexPolynomial([1.0, 1.0]).pow(3)
    expected = RationalMap(ComplexPolynomial([0, 0, 1, 0, -1, -1]), cube)
    gap = map_coefficient_distance(built, expected)
    reports = fixed_points(built, zeroes_of_f=(0j,))
    census = critical_census(built)
    fatou = herman_ring_bound(reports, built.degree())
    inf_report = reports[-1]
    ext = [r for r in reports if not is_infinite(r.location) and r.extraneous]
    disc = cmath.sqrt(4 * (b * c - a * d) + a * a)
    closed = ((-(2 * d - a) + disc) / (2 * c), (-(2 * d - a) - disc) / (2 * c))
    ok_ext = len(ext) == 2 and all(
        min(abs(r.location - t) for r in ext) <= 1e-8 for t in closed) and all(
        abs(r.multiplier - 1.0) <= 1e-6 and r.multiplicity == 2 for r in ext)
    zero_report = _nearest(reports, 0j)
    checks = [
        ("degree", "5", str(built.degree()), 0.0, built.degree() == 5),
        ("coefficient identity vs z^2(1-z^2-z^3)/(z+1)^3", "gap <= tol",
         _fmt(gap), 1e-10, gap <= 1e-10),
        ("zero of f superattracting", SUPERATTRACTING, zero_report.classification,
         1e-8, zero_report.classification == SUPERATTRACTING),
        ("infinity multiplier", "0", _fmt(inf_report.multiplier), 1e-9,
         is_infinite(inf_report.location) and abs(inf_report.multiplier) <= 1e-9),
        ("extraneous points (-1+-i sqrt3)/2, multiplicity 2, multiplier 1",
         "as stated",
         "; ".join(f"{_fmt(r.location)} m={_fmt(r.multiplier)} x{r.multiplicity}"
                   for r in ext), 1e-6, ok_ext),
        ("critical points including infinity", "8", str(census.total), 0.0,
         census.total == 8 and census.expected_total == 8),
        ("herman ring upper bound", "2", str(fatou.herman_upper), 0.0,
         fatou.herman_upper == 2),
    ]
    return _report("mobius_a=c=d=1_b=0", checks)


def _case_polynomial_infinity() -> VerificationReport:
    samples = (ComplexPolynomial([4.0, 0.0, 1.0]),           # z^2 + 4
               ComplexPolynomial([-1.0, 0.0, 0.0, 1.0]),     # z^3 - 1
               ComplexPolynomial([2.0, -1.0, 0.0, 0.0, 1.0]))  # z^4 - z + 2
    checks = []
    for p in samples:
        built = build_stirling_polynomial(p)
        zeroes = p.roots().locations
        reports = fixed_points(built, zeroes_of_f=zeroes)
        inf_report = reports[-1]
        finite_ext = [r for r in reports if not is_infinite(r.location) and r.extraneous]
        n = int(p.degree())
        checks.append((f"deg {n}: degree law", str(n * n - n + 1),
                       str(built.degree()), 0.0,
                       built.degree() == n * n - n + 1))
        checks.append((f"deg {n}: infinity multiplier", "1",
                       _fmt(inf_report.multiplier), 1e-6,
                       is_infinite(inf_report.location)
                       and abs(inf_report.multiplier - 1.0) <= 1e-6))
        checks.append((f"deg {n}: finite extraneous points", "none",
                       str(len(finite_ext)), 0.0, not finite_ext))
    return _report("polynomial_infinity_parabolic", checks)


def _case_scaling_witnesses() -> VerificationReport:
    f = ComplexPolynomial([-1.0, 0.0, 1.0])
    mismatch = scaling_check(f, 2.0, 0.0, 1.0)
    equality = scaling_check(f, 2.0, 0.0, 0.5)
    checks = [
        ("a=2, lam=1: conjugated map differs", "pass", str(mismatch.passed), 0.0,
         mismatch.passed),
        ("a=2, lam=1/2 (a*lam=1): conjugated map equals original", "pass",
         str(equality.passed), 0.0, equality.passed),
    ]
    return _report("scaling_behaviour_quadratic", checks)


def _case_repeated_zero() -> VerificationReport:
    checks = []
    for n in (2, 3, 4):
        rep = repeated_zero_multiplier(ComplexPolynomial([1.0]), 1.0, n)
        w = rep.witnesses[0]
        checks.append((w.label, w.expected, w.observed, w.tolerance, rep.passed))
    return _report("repeated_zero_multipliers", checks)


def _case_pole_gap() -> VerificationReport:
    # deg P - deg Q = 3 makes the pole of P/Q itself a fixed point of the
    # Stirling map; its multiplier follows the degree-gap closed form and the
    # deflection residual |Q(z - P/Q)| does NOT vanish there.
    p = ComplexPolynomial([-1.0, 0.0, 0.0, 0.0, 1.0])   # z^4 - 1
    q = ComplexPolynomial([0.0, 1.0])                   # z
    built = build_stirling_rational(p, q)
    reports = fixed_points(built, zeroes_of_f=p.roots().locations)
    at_pole = _nearest(reports, 0j)
    predicted = pole_shifted_extraneous_multiplier(p, q, 0j)
    residual = theorem_extraneous_residual(p, q, at_pole.location)
    checks = [
        ("pole of P/Q is a fixed point", "location 0", _fmt(at_pole.location),
         1e-8, abs(at_pole.location) <= 1e-8),
        ("its multiplier follows the degree-gap law", _fmt(predicted),
         _fmt(at_pole.multiplier), 1e-8,
         abs(at_pole.multiplier - predicted) <= 1e-8),
        ("deflection residual |Q(z - P/Q)| stays away from 0", "> 1e-3",
         _fmt(residual), 0.0, residual > 1e-3),
    ]
    return _report("pole_fixed_point_at_degree_gap_3", checks)


def reference_case_suite() -> list[VerificationReport]:
    """Regression anchor: every worked golden case, aggregated by name."""
    reports = [
        _case_rational_simple_zero(),
        _case_unicritical(-4.0),
        _case_unicritical(4.0),
        _case_mobius_a_zero(),
        _case_mobius_a_nonzero(),
        _case_polynomial_infinity(),
        _case_scaling_witnesses(),
        _case_repeated_zero(),
        _case_pole_gap(),
    ]
    return sorted(reports, key=lambda r: r.name)


def _random_simple_zero_poly(rng, degree: int) -> ComplexPolynomial:
    while True:
        roots = rng.uniform(-2.0, 2.0, degree) + 1j * rng.uniform(-2.0, 2.0, degree)
        if degree == 1 or min(abs(roots[i] - roots[j])
                              for i in range(degree)
                              for j in range(i + 1, degree)) > 0.3:
            break
    lead = complex(rng.uniform(0.5, 1.5) + 1j * rng.uniform(-0.5, 0.5))
    return ComplexPolynomial.from_roots([complex(r) for r in roots], lead)


def scaling_suite(draws: int = 20, seed: int = 0x5CA1E) -> list[VerificationReport]:
    """Randomized rescaling batch; every fourth draw forces a*lam = 1."""
    rng = np.random.default_rng(seed)
    reports = []
    for i in range(draws):
        degree = int(rng.integers(2, 5))
        f = _random_simple_zero_poly(rng, degree)
        a = complex(rng.uniform(0.5, 2.0) + 1j * rng.uniform(-0.5, 0.5))
        b = complex(rng.uniform(-1.0, 1.0) + 1j * rng.uniform(-1.0, 1.0))
        lam = 1.0 / a if i % 4 == 0 else complex(rng.uniform(0.5, 2.0)
                                                 + 1j * rng.uniform(-0.5, 0.5))
        rep = scaling_check(f, a, b, lam)
        reports.append(VerificationReport(f"scaling_draw_{i:02d}", rep.passed,
                                          rep.witnesses))
    return sorted(reports, key=lambda r: r.name)


def symmetry_suite() -> list[VerificationReport]:
    reports = []
    for beta in (-4.0, 4.0, 0.7):
        rep = symmetry_check(build_stirling_unicritical(1.0, 0.0, beta))
        reports.append(VerificationReport(f"symmetry_beta_{beta:g}", rep.passed,
                                          rep.witnesses))
    return sorted(reports, key=lambda r: r.name)


SUITES = ("scaling", "symmetry", "paper-cases", "all")


def run_suite(name: str) -> list[VerificationReport]:
    if name == "scaling":
        return scaling_suite()
    if name == "symmetry":
        return symmetry_suite()
    if name == "paper-cases":
        return reference_case_suite()
    if name == "all":
        out = scaling_suite() + symmetry_suite() + reference_case_suite()
        return sorted(out, key=lambda r: r.name)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
