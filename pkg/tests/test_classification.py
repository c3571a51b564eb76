"""Fixed points, critical points, and the Fatou census."""

import cmath
import math

import numpy as np
import pytest

from _support import random_simple_zero_poly, rel_gap
from stirlingdyn import (ComplexPolynomial, build_newton, build_stirling_mobius,
                         build_stirling_polynomial, build_stirling_rational,
                         build_stirling_unicritical, classify_infinity,
                         classify_multiplier, critical_census, critical_points,
                         fixed_points, free_critical_points, herman_ring_bound,
                         is_infinite)
from stirlingdyn.classification import (ATTRACTING, INDIFFERENT_UNRESOLVED,
                                        RATIONALLY_INDIFFERENT, REPELLING,
                                        SUPERATTRACTING,
                                        pole_shifted_extraneous_multiplier,
                                        theorem_extraneous_residual)
from stirlingdyn.rational import RationalMap, central_difference_derivative

X = ComplexPolynomial([0, 1])


def _by_location(reports, target):
    finite = [r for r in reports if not is_infinite(r.location)]
    return min(finite, key=lambda r: abs(r.location - target))


def test_classify_multiplier_thresholds():
    assert classify_multiplier(0j)[0] == SUPERATTRACTING
    assert classify_multiplier(1e-9 + 0j)[0] == SUPERATTRACTING
    assert classify_multiplier(0.5 + 0j)[0] == ATTRACTING
    assert classify_multiplier(1 + 0j) == (RATIONALLY_INDIFFERENT, 1)
    assert classify_multiplier(-1 + 0j) == (RATIONALLY_INDIFFERENT, 2)
    q5 = cmath.exp(2j * cmath.pi / 5)
    assert classify_multiplier(q5) == (RATIONALLY_INDIFFERENT, 5)
    golden = cmath.exp(2j * cmath.pi * (math.sqrt(5) - 1) / 2)
    assert classify_multiplier(golden)[0] == INDIFFERENT_UNRESOLVED
    assert classify_multiplier(2 + 0j)[0] == REPELLING


def test_fixed_points_of_reciprocal_example():
    f = build_stirling_rational(ComplexPolynomial([-1, 2]), X)
    reports = fixed_points(f, zeroes_of_f=(0.5 + 0j,))
    half = _by_location(reports, 0.5)
    one = _by_location(reports, 1.0)
    assert abs(half.multiplier) < 1e-8 and not half.extraneous
    assert half.classification == SUPERATTRACTING
    assert abs(one.multiplier - 1) < 1e-6 and one.extraneous
    assert one.classification == RATIONALLY_INDIFFERENT
    assert one.multiplicity == 4
    assert is_infinite(reports[-1].location)


def test_fixed_points_sorted_and_infinity_last():
    f = build_stirling_unicritical(1, 0, -4)
    reports = fixed_points(f, zeroes_of_f=(2 + 0j, -2 + 0j))
    finite = [r.location for r in reports if not is_infinite(r.location)]
    assert finite == sorted(finite, key=lambda z: (z.real, z.imag))
    assert is_infinite(reports[-1].location)
    inf = reports[-1]
    assert inf.classification == RATIONALLY_INDIFFERENT
    assert abs(inf.multiplier - 1) < 1e-10
    for z in (2, -2):
        r = _by_location(reports, z)
        assert r.classification == SUPERATTRACTING and not r.extraneous


def test_no_finite_extraneous_for_polynomial_inputs():
    rng = np.random.default_rng(41)
    for n in (2, 3, 4):
        p = random_simple_zero_poly(rng, n)
        f = build_stirling_polynomial(p)
        reports = fixed_points(f, zeroes_of_f=p.roots().locations)
        assert not any(r.extraneous for r in reports if not is_infinite(r.location))


def test_classify_infinity_polynomial_is_parabolic():
    rng = np.random.default_rng(42)
    for n in (2, 3, 4):
        p = random_simple_zero_poly(rng, n)
        rep = classify_infinity(build_stirling_polynomial(p))
        assert rep is not None
        assert abs(rep.multiplier - 1) < 1e-6
        assert rep.classification == RATIONALLY_INDIFFERENT


def test_classify_infinity_mobius_cases():
    r0 = classify_infinity(build_stirling_mobius(0, 1j, 1j, 1))
    assert abs(r0.multiplier - 0.5) < 1e-12 and r0.classification == ATTRACTING
    r1 = classify_infinity(build_stirling_mobius(1, 0, 1, 1))
    assert abs(r1.multiplier) < 1e-12 and r1.classification == SUPERATTRACTING


def test_classify_infinity_absent_when_not_fixed():
    f = RationalMap(X, ComplexPolynomial([1, 0, 1]))  # z/(z^2+1): f(inf) = 0
    assert classify_infinity(f) is None


def test_mobius_extraneous_case_a_zero():
    f = build_stirling_mobius(0, 1j, 1j, 1)
    reports = fixed_points(f, zeroes_of_f=())
    finite = [r for r in reports if not is_infinite(r.location)]
    assert len(finite) == 2
    for target in (1 + 1j, -1 + 1j):
        r = _by_location(reports, target)
        assert abs(r.location - target) < 1e-8
        assert r.multiplicity == 2 and r.extraneous
        assert abs(r.multiplier - 1) < 1e-6


def test_mobius_extraneous_case_a_nonzero_closed_form():
    a, b, c, d = 1.0, 0.0, 1.0, 1.0
    f = build_stirling_mobius(a, b, c, d)
    reports = fixed_points(f, zeroes_of_f=(0j,))
    disc = cmath.sqrt(4 * (b * c - a * d) + a * a)
    for target in ((-(2 * d - a) + disc) / (2 * c), (-(2 * d - a) - disc) / (2 * c)):
        r = _by_location(reports, target)
        assert abs(r.location - target) < 1e-8
        assert r.multiplicity == 2 and r.extraneous
        assert abs(r.multiplier - 1) < 1e-6


def test_multiplier_against_finite_difference():
    maps = [build_stirling_unicritical(1, 0, -4),
            build_stirling_mobius(1, 0, 1, 1),
            build_newton(ComplexPolynomial([-1, 0, 1]))]
    for f in maps:
        for r in fixed_points(f):
            if is_infinite(r.location):
                continue
            fd = central_difference_derivative(f, r.location)
            assert rel_gap(fd, r.multiplier) <= 1e-5


def test_critical_points_unicritical():
    beta = -4.0
    f = build_stirling_unicritical(1, 0, beta)
    crits = critical_points(f)
    s = math.sqrt(2 * (1 - 2 * beta))
    expected = [2.0, -2.0, (2 + s) / 2, (2 - s) / 2]
    assert crits.total_multiplicity() == 4
    for e in expected:
        assert min(abs(complex(e) - loc) for loc in crits.locations) < 1e-8


def test_free_critical_points_unicritical():
    f = build_stirling_unicritical(1, 0, -4)
    free = free_critical_points(f, (2 + 0j, -2 + 0j))
    s = math.sqrt(18)
    assert len(free) == 2
    assert min(abs(z - (2 - s) / 2) for z in free) < 1e-8
    assert min(abs(z - (2 + s) / 2) for z in free) < 1e-8


def test_free_critical_points_merge_when_square_root_vanishes():
    # 2(1 - 2 beta) = 0 at beta = 1/2: the two free critical points collide at 1
    f = build_stirling_unicritical(1, 0, 0.5)
    zeroes = (cmath.sqrt(-0.5 + 0j), -cmath.sqrt(-0.5 + 0j))
    free = free_critical_points(f, zeroes)
    assert len(free) == 1
    assert abs(free[0] - 1.0) < 1e-6


def test_free_critical_points_beta_quarter():
    # beta = 1/4 gives (2 +- 1)/2; the point 1/2 sits on a pole of the map
    f = build_stirling_unicritical(1, 0, 0.25)
    zeroes = (0.5j, -0.5j)
    free = free_critical_points(f, zeroes)
    assert len(free) == 2
    assert min(abs(z - 0.5) for z in free) < 1e-8
    assert min(abs(z - 1.5) for z in free) < 1e-8


def test_newton_critical_points_are_roots():
    f = build_newton(ComplexPolynomial([-1, 0, 1]))
    crits = critical_points(f)
    locs = sorted(crits.locations, key=lambda z: z.real)
    assert abs(locs[0] + 1) < 1e-10 and abs(locs[1] - 1) < 1e-10
    assert free_critical_points(f, (1 + 0j, -1 + 0j)) == []


def test_critical_census_mobius():
    c0 = critical_census(build_stirling_mobius(0, 1j, 1j, 1))
    assert c0.total == 6 and c0.expected_total == 6
    assert c0.infinity_multiplicity == 0
    c1 = critical_census(build_stirling_mobius(1, 0, 1, 1))
    assert c1.total == 8 and c1.expected_total == 8
    assert c1.infinity_multiplicity == 1   # superattracting infinity is critical


def test_critical_census_generic_mobius():
    rng = np.random.default_rng(43)
    for _ in range(5):
        a = complex(rng.uniform(0.3, 2), rng.uniform(-1, 1))
        b = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        c = complex(rng.uniform(0.3, 2), rng.uniform(-1, 1))
        d = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if abs(a * d - b * c) < 0.1:
            continue
        f = build_stirling_mobius(a, b, c, d)
        census = critical_census(f)
        assert f.degree() == 5
        assert census.total == 8


def test_herman_ring_bounds():
    f0 = build_stirling_mobius(0, 1j, 1j, 1)
    fat0 = herman_ring_bound(fixed_points(f0, ()), f0.degree())
    assert (fat0.n_AB_lower, fat0.n_PB_lower, fat0.herman_upper) == (1, 2, 1)
    f1 = build_stirling_mobius(1, 0, 1, 1)
    fat1 = herman_ring_bound(fixed_points(f1, (0j,)), f1.degree())
    assert (fat1.n_AB_lower, fat1.n_PB_lower, fat1.herman_upper) == (2, 2, 2)
    p = ComplexPolynomial([4, 0, 1])
    fp = build_stirling_polynomial(p)
    fatp = herman_ring_bound(fixed_points(fp, p.roots().locations), fp.degree())
    assert fatp.d == 3 and fatp.n_AB_lower == 2 and fatp.n_PB_lower == 1
    assert fatp.herman_upper == 0


def test_zeroes_always_superattracting_for_rational_inputs():
    from stirlingdyn import MapSpec, step_derivative_numeric
    rng = np.random.default_rng(44)
    for _ in range(10):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(0, 4))
        p = random_simple_zero_poly(rng, n)
        q = (ComplexPolynomial([1.0]) if m == 0
             else random_simple_zero_poly(rng, m, avoid=p.roots().locations))
        spec = MapSpec(kind="rational", num=tuple(p.coeffs.tolist()),
                       den=tuple(q.coeffs.tolist()))
        f = build_stirling_rational(p, q)
        reports = fixed_points(f, zeroes_of_f=p.roots().locations,
                               multiplier_fn=lambda z: step_derivative_numeric(spec, z))
        for z in p.roots().locations:
            r = _by_location(reports, z)
            assert abs(r.location - z) < 1e-6
            assert abs(r.multiplier) < 1e-8


def test_deflection_extraneous_rationally_indifferent():
    # deg gap <= 2: every finite extraneous point solves Q(z - P/Q) = 0
    from stirlingdyn import MapSpec, step_derivative_numeric
    rng = np.random.default_rng(45)
    p = random_simple_zero_poly(rng, 3)
    q = random_simple_zero_poly(rng, 2, avoid=p.roots().locations)
    spec = MapSpec(kind="rational", num=tuple(p.coeffs.tolist()),
                   den=tuple(q.coeffs.tolist()))
    f = build_stirling_rational(p, q)
    reports = fixed_points(f, zeroes_of_f=p.roots().locations,
                           multiplier_fn=lambda z: step_derivative_numeric(spec, z))
    ext = [r for r in reports if r.extraneous and not is_infinite(r.location)]
    assert ext, "expected extraneous fixed points"
    for r in ext:
        assert theorem_extraneous_residual(p, q, r.location) < 1e-6
        assert abs(r.multiplier - 1) < 1e-4


def test_pole_fixed_point_at_degree_gap_three():
    # deg P - deg Q = 3: the pole of P/Q is an extra fixed point whose
    # multiplier follows the derived closed form, not the indifferent law
    p = ComplexPolynomial([-1, 0, 0, 0, 1])  # z^4 - 1
    q = X
    f = build_stirling_rational(p, q)
    reports = fixed_points(f, zeroes_of_f=p.roots().locations)
    at_pole = _by_location(reports, 0j)
    assert abs(at_pole.location) < 1e-8 and at_pole.extraneous
    predicted = pole_shifted_extraneous_multiplier(p, q, 0j)
    assert abs(predicted - 4.0 / 3.0) < 1e-12
    assert abs(at_pole.multiplier - predicted) < 1e-8
    assert theorem_extraneous_residual(p, q, at_pole.location) > 1e-3
