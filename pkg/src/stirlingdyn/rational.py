"""Rational maps on the Riemann sphere as numerator/denominator pairs.

No polynomial GCD is ever taken: inexact coefficients make GCD numerically
treacherous.  Only exact monomial factors z**k are cancelled on construction;
approximate common roots are *audited* (reported), never silently removed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polynomial import ComplexPolynomial, _eval_scale

COMMON_ROOT_TOL = 1e-8


class Indeterminate(ArithmeticError):
    """0/0 at a point: an uncancelled common root.  Inspect common_root_audit()."""


class DegenerateAffine(ValueError):
    """Affine map with zero linear coefficient."""


class _Infinity:
    """Point-at-infinity sentinel on the Riemann sphere."""

    __slots__ = ()

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()

#: A point on the Riemann sphere: a finite complex value or INFINITY.
SpherePoint = complex | _Infinity


def is_infinite(p: SpherePoint) -> bool:
    return isinstance(p, _Infinity)


def _low_order_zeros(p: ComplexPolynomial) -> int:
    k = 0
    while k < p.coeffs.size and p.coeffs[k] == 0:
        k += 1
    return k


@dataclass(frozen=True)
class RationalMap:
    """Reduced-form pair num/den; den must not be the zero polynomial."""

    num: ComplexPolynomial
    den: ComplexPolynomial

    def __post_init__(self):
        num, den = self.num, self.den
        if not isinstance(num, ComplexPolynomial):
            num = ComplexPolynomial(num)
        if not isinstance(den, ComplexPolynomial):
            den = ComplexPolynomial(den)
        if den.is_zero:
            raise ZeroDivisionError("rational map denominator is the zero polynomial")
        # cancel the exact common monomial factor z**k
        k = min(_low_order_zeros(num) if not num.is_zero else 0,
                _low_order_zeros(den))
        if k and not num.is_zero:
            num = ComplexPolynomial(num.coeffs[k:])
            den = ComplexPolynomial(den.coeffs[k:])
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    # -- structure ----------------------------------------------------------

    def degree(self) -> int:
        if self.num.is_zero:
            return 0
        return int(max(self.num.degree(), self.den.degree()))

    def normalized(self) -> "RationalMap":
        """Divide num and den by den's leading coefficient.

        Makes "same map" a plain coefficient-vector comparison.
        """
        lead = self.den.leading
        return RationalMap(self.num.scale(1.0 / lead), self.den.scale(1.0 / lead))

    def common_root_audit(self) -> tuple[complex, ...]:
        """Roots of den at which num is also (numerically) zero."""
        if self.den.degree() < 1:
            return ()
        flagged = []
        for r in self.den.roots().locations:
            scale = _eval_scale(self.num.coeffs, r) or 1.0
            if abs(self.num(r)) < COMMON_ROOT_TOL * scale:
                flagged.append(r)
        return tuple(flagged)

    # -- evaluation ----------------------------------------------------------

    def __call__(self, z):
        """Raw finite evaluation num(z)/den(z); no pole bookkeeping."""
        return self.num(z) / self.den(z)

    def eval_sphere(self, z: SpherePoint) -> SpherePoint:
        """Evaluate as a map of the Riemann sphere.

        Raises Indeterminate at a finite point where num and den both vanish.
        """
        if is_infinite(z):
            dn, dd = self.num.degree(), self.den.degree()
            if self.num.is_zero:
                return 0j
            if dn > dd:
                return INFINITY
            if dn < dd:
                return 0j
            return self.num.leading / self.den.leading
        nv = self.num(z)
        dv = self.den(z)
        if dv == 0:
            scale = _eval_scale(self.num.coeffs, z) or 1.0
            if abs(nv) <= COMMON_ROOT_TOL * scale:
                raise Indeterminate(f"0/0 at z={z!r}: uncancelled common root")
            return INFINITY
        w = nv / dv
        if not (np.isfinite(w.real) and np.isfinite(w.imag)):
            return INFINITY
        return w

    def derivative_map(self) -> "RationalMap":
        """(num' den - num den') / den**2, with monomial cancellation."""
        w = self.num.derivative() * self.den - self.num * self.den.derivative()
        return RationalMap(w, self.den * self.den)


def eval_sphere(f: RationalMap, z: SpherePoint) -> SpherePoint:
    return f.eval_sphere(z)


def compose_poly_rational(p: ComplexPolynomial, f: RationalMap) -> RationalMap:
    """p(f) as a rational map: sum_j p_j num^j den^(m-j) over den^m."""
    if p.is_zero:
        return RationalMap(ComplexPolynomial(), ComplexPolynomial([1.0]))
    m = int(p.degree())
    acc = ComplexPolynomial([p.coeffs[-1]])
    dpow = ComplexPolynomial([1.0])
    for a in p.coeffs[-2::-1]:
        dpow = dpow * f.den
        acc = acc * f.num + ComplexPolynomial([a]) * dpow
    return RationalMap(acc, f.den.pow(m))


def affine_conjugate(f: RationalMap, a: complex, b: complex = 0j) -> RationalMap:
    """T o f o T^-1 for the affine map T(z) = a z + b."""
    if a == 0:
        raise DegenerateAffine("affine map needs a != 0")
    inv = ComplexPolynomial([-b / a, 1.0 / a])  # T^-1
    num_i = f.num.compose(inv)
    den_i = f.den.compose(inv)
    return RationalMap(num_i.scale(a) + den_i.scale(b), den_i)


def reversed_poly(p: ComplexPolynomial, d: int) -> ComplexPolynomial:
    """w**d * p(1/w): coefficients reversed into a length d+1 vector."""
    out = np.zeros(d + 1, dtype=np.complex128)
    for j, cj in enumerate(p.coeffs):
        out[d - j] = cj
    return ComplexPolynomial(out)


def conjugate_reciprocal(f: RationalMap) -> RationalMap:
    """The map g with g(w) = 1/f(1/w); g near 0 mirrors f near infinity."""
    if f.num.is_zero:
        raise ZeroDivisionError("reciprocal of the zero map is not rational")
    d = int(max(f.num.degree(), f.den.degree()))
    return RationalMap(reversed_poly(f.den, d), reversed_poly(f.num, d))


def central_difference_derivative(f: RationalMap, z: complex,
                                  h: float | None = None) -> complex:
    """Two-point central difference of the finite evaluation; test oracle."""
    if h is None:
        h = 1e-6 * (1.0 + abs(z))
    return (f(z + h) - f(z - h)) / (2.0 * h)


def stencil_derivative(fn, z: complex, h: float | None = None,
                       points: int = 8) -> complex:
    """Derivative of an analytic callable from an m-point circular stencil.

    Truncation error is O(h**points) with roundoff O(eps/h), which survives
    the cancellation that defeats two-point differences for functions that
    are flat to high order, and avoids evaluating expanded high-degree
    coefficient forms where those are ill-conditioned.
    """
    import cmath

    if h is None:
        h = 1e-3 * (1.0 + abs(z))
    acc = 0j
    for j in range(points):
        w = cmath.exp(2j * cmath.pi * j / points)
        acc += complex(fn(z + h * w)) * w.conjugate()
    return acc / (points * h)
