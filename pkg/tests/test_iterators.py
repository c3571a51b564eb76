"""Map builders and their pointwise cross-check oracle."""

import numpy as np
import pytest

from _support import maps_close, random_simple_zero_poly, rel_gap
from stirlingdyn import (ComplexPolynomial, MapSpec, RationalMap, build_map,
                         build_newton, build_stirling_mobius,
                         build_stirling_polynomial, build_stirling_rational,
                         build_stirling_unicritical, eval_sphere, is_infinite,
                         newton_step_numeric, step_numeric,
                         stirling_rational_parts, stirling_step_numeric)
from stirlingdyn.iterators import InvalidMobius, InvalidParameters, PoleEncountered

X = ComplexPolynomial([0, 1])


def _closed_quadratic(beta):
    num = ComplexPolynomial([beta, 2 * beta, -1, 2])
    den = ComplexPolynomial([2 * beta, -2, 2])
    return RationalMap(num, den)


def test_polynomial_builder_quadratic_closed_form():
    for beta in (0.7, -4.0, 4.0, 2.5j):
        built = build_stirling_polynomial(ComplexPolynomial([beta, 0, 1]))
        assert maps_close(built, _closed_quadratic(beta), 1e-12)


def test_polynomial_builder_linear_gives_constant_zero():
    built = build_stirling_polynomial(X)
    assert built.num.is_zero
    assert eval_sphere(built, 3.7 + 1j) == 0j


def test_polynomial_degree_law_quadratic():
    built = build_stirling_polynomial(ComplexPolynomial([-1, 0, 1]))
    assert built.degree() == 3


def test_polynomial_degree_law_random():
    rng = np.random.default_rng(31)
    for n in (2, 3, 4):
        p = random_simple_zero_poly(rng, n)
        assert build_stirling_polynomial(p).degree() == n * n - n + 1


def test_rational_builder_reciprocal_example():
    p, q = ComplexPolynomial([-1, 2]), X
    built = build_stirling_rational(p, q)
    z3 = q.pow(3)
    expected = RationalMap(X * z3 - ComplexPolynomial([-1, 1]).pow(4) * p, z3)
    assert maps_close(built, expected, 1e-12)


def test_rational_builder_constant_denominator_matches_polynomial():
    rng = np.random.default_rng(32)
    for n in (1, 2, 3, 4):
        p = random_simple_zero_poly(rng, n)
        a = build_stirling_rational(p, ComplexPolynomial([1.0]))
        b = build_stirling_polynomial(p)
        assert maps_close(a, b, 1e-10)


def test_rational_builder_mobius_numerator_example():
    built = build_stirling_rational(ComplexPolynomial([1j]), ComplexPolynomial([1, 1j]))
    cube = ComplexPolynomial([1, 1j]).pow(3)
    core = ComplexPolynomial([-2, -2j, 1])
    expected = RationalMap(X * cube - core * core * ComplexPolynomial([1j]), cube)
    assert maps_close(built, expected, 1e-12)


def test_rational_parts_expose_deflection_data():
    parts = stirling_rational_parts(ComplexPolynomial([-1, 2]), X)
    assert np.allclose(parts.deflected.coeffs, [1, -2, 1])   # (z-1)^2
    assert np.allclose(parts.q_of_k.coeffs, [1, -2, 1])      # Q(k) * Q
    assert np.allclose(parts.wronskian.coeffs, [0, 1])


def test_mobius_case_a_zero():
    built = build_stirling_mobius(0, 1j, 1j, 1)
    assert built.degree() == 4
    generic = build_stirling_rational(ComplexPolynomial([1j]), ComplexPolynomial([1, 1j]))
    assert maps_close(built, generic, 1e-10)


def test_mobius_case_a_nonzero_closed_form():
    built = build_stirling_mobius(1, 0, 1, 1)
    assert built.degree() == 5
    expected = RationalMap(ComplexPolynomial([0, 0, 1, 0, -1, -1]),
                           ComplexPolynomial([1, 1]).pow(3))
    assert maps_close(built, expected, 1e-12)


def test_mobius_matches_generic_rational_builder():
    rng = np.random.default_rng(33)
    for _ in range(12):
        a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if rng.uniform() < 0.3:
            a = 0j
        b = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        c = complex(rng.uniform(0.3, 2), rng.uniform(-2, 2))
        d = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if abs(a * d - b * c) < 0.1 or (a == 0 and abs(b) < 0.1):
            continue
        built = build_stirling_mobius(a, b, c, d)
        generic = build_stirling_rational(ComplexPolynomial([b, a]),
                                          ComplexPolynomial([d, c]))
        assert maps_close(built, generic, 1e-10)
        assert built.degree() == (4 if a == 0 else 5)


def test_mobius_rejects_degenerate():
    with pytest.raises(InvalidMobius):
        build_stirling_mobius(1, 2, 2, 4)   # ad - bc = 0
    with pytest.raises(InvalidMobius):
        build_stirling_mobius(1, 1, 0, 1)   # affine input


def test_unicritical_reduces_to_polynomial_builder():
    for beta in (0.7, -4.0, 4.0, 1.3 - 0.2j):
        a = build_stirling_unicritical(1, 0, beta)
        b = build_stirling_polynomial(ComplexPolynomial([beta, 0, 1]))
        assert maps_close(a, b, 1e-12)


def test_unicritical_fixed_points():
    f = build_stirling_unicritical(1, 0, -4)
    for z in (2, -2):
        assert eval_sphere(f, complex(z)) == complex(z)
    g = build_stirling_unicritical(1, 0, 4)
    for z in (2j, -2j):
        assert abs(eval_sphere(g, z) - z) < 1e-15


def test_unicritical_general_parameters_match_direct_assembly():
    lam, alpha, beta = 1.5 - 0.5j, 0.3 + 0.1j, -2.0 + 1j
    f = ComplexPolynomial([lam * alpha ** 2 + beta, -2 * lam * alpha, lam])
    assert maps_close(build_stirling_unicritical(lam, alpha, beta),
                      build_stirling_polynomial(f), 1e-12)


def test_unicritical_rejects_zero_lambda():
    with pytest.raises(InvalidParameters):
        build_stirling_unicritical(0, 0, 1)


def test_newton_classics():
    n1 = build_newton(ComplexPolynomial([-1, 0, 1]))
    assert maps_close(n1, RationalMap(ComplexPolynomial([1, 0, 1]),
                                      ComplexPolynomial([0, 2])), 1e-12)
    n2 = build_newton(ComplexPolynomial([0, 0, 1]))
    assert maps_close(n2, RationalMap(ComplexPolynomial([0, 1]),
                                      ComplexPolynomial([2])), 1e-12)


def test_newton_rational_input():
    # f = (az+b)/(cz+d) gives the quadratic polynomial map z - (az+b)(cz+d)/(ad-bc)
    a, b, c, d = 1.0, 0.0, 1.0, 1.0
    n = build_newton(ComplexPolynomial([b, a]), ComplexPolynomial([d, c]))
    assert n.degree() == 2
    assert abs(n(0.0 + 0j)) == 0  # the zero of f is fixed


def test_step_numeric_examples():
    spec = MapSpec(kind="polynomial", coefficients=(-4, 0, 1))
    assert stirling_step_numeric(spec, 2.0 + 0j) == 2.0 + 0j
    spec2 = MapSpec(kind="polynomial", coefficients=(4, 0, 1))
    assert stirling_step_numeric(spec2, 1.0 + 0j) == pytest.approx(1.625)


def test_step_numeric_pole():
    spec = MapSpec(kind="unicritical", lam=1, alpha=0, beta=0.25)
    with pytest.raises(PoleEncountered):
        stirling_step_numeric(spec, 0.5 + 0j)


def test_newton_step_numeric():
    spec = MapSpec(kind="polynomial", method="newton", coefficients=(-1, 0, 1))
    assert newton_step_numeric(spec, 2.0 + 0j) == pytest.approx(1.25)
    with pytest.raises(PoleEncountered):
        newton_step_numeric(spec, 0j)


def _random_specs(rng):
    p = random_simple_zero_poly(rng, int(rng.integers(2, 6)))
    yield MapSpec(kind="polynomial", coefficients=tuple(p.coeffs.tolist()))
    q = random_simple_zero_poly(rng, int(rng.integers(1, 4)))
    yield MapSpec(kind="rational", num=tuple(p.coeffs.tolist()),
                  den=tuple(q.coeffs.tolist()))
    a = complex(rng.uniform(0.3, 2), rng.uniform(-1, 1))
    b = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
    c = complex(rng.uniform(0.3, 2), rng.uniform(-1, 1))
    d = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
    if abs(a * d - b * c) > 0.1:
        yield MapSpec(kind="mobius", a=a, b=b, c=c, d=d)
    yield MapSpec(kind="unicritical", lam=complex(rng.uniform(0.5, 2)),
                  alpha=complex(rng.uniform(-1, 1)), beta=complex(rng.uniform(0.2, 2)))
    yield MapSpec(kind="polynomial", method="newton",
                  coefficients=tuple(p.coeffs.tolist()))


def test_symbolic_pointwise_agreement():
    rng = np.random.default_rng(34)
    total = 0
    for _ in range(6):
        for spec in _random_specs(rng):
            built = build_map(spec)
            hits = 0
            while hits < 20:
                z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
                if abs(built.den(z)) < 1e-4:
                    continue
                try:
                    want = step_numeric(spec, z)
                except PoleEncountered:
                    continue
                got = eval_sphere(built, z)
                if is_infinite(got):
                    continue
                assert abs(got - want) <= 1e-8 * (1 + abs(z)) + 1e-8 * abs(want)
                hits += 1
                total += 1
    assert total >= 100
