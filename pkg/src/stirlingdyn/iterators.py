"""Symbolic construction of Stirling and Newton iteration maps.

The Stirling step for a function f is  z -> z - f(z)/f'(z - f(z)).  Each
input class (general polynomial, rational P/Q, Moebius map, unicritical
quadratic) gets its own constructor returning a RationalMap; a pointwise
numeric stepper serves as an independent cross-check oracle for all of them.

For a rational input P/Q the assembly keeps every intermediate over an
explicit power of Q, so identical symbolic factors Q**a/Q**b cancel exactly
(by exponent bookkeeping, never by numeric GCD).  With k = z - P/Q and
hat-numerators  X^ = X(k) * Q**deg(X):

    St = z - P * Qk^**2 * Q**(n-m-2) / S^          (exponent clipped at 0,
    S^ = Qk^ * (P')^  -  P^ * (Q')^                 deficit moved to the den)
"""

from __future__ import annotations

from dataclasses import dataclass

from .polynomial import ComplexPolynomial
from .rational import RationalMap

_X = ComplexPolynomial([0.0, 1.0])


class InvalidMobius(ValueError):
    """Moebius parameters with ad - bc = 0 or c = 0."""


class InvalidParameters(ValueError):
    """Unicritical parameters outside the admissible range."""


class PoleEncountered(ArithmeticError):
    """The numeric step hit a zero of f'(z - f(z))."""


KINDS = ("polynomial", "rational", "mobius", "unicritical")
METHODS = ("stirling", "newton")


@dataclass(frozen=True)
class MapSpec:
    """Input description for the CLI and the numeric stepper."""

    kind: str
    method: str = "stirling"
    coefficients: tuple[complex, ...] | None = None   # polynomial
    num: tuple[complex, ...] | None = None            # rational
    den: tuple[complex, ...] | None = None
    a: complex | None = None                          # mobius
    b: complex | None = None
    c: complex | None = None
    d: complex | None = None
    lam: complex | None = None                        # unicritical
    alpha: complex | None = None
    beta: complex | None = None

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.kind == "polynomial":
            if not self.coefficients or ComplexPolynomial(self.coefficients).degree() < 1:
                raise ValueError("polynomial spec needs degree >= 1 coefficients")
        elif self.kind == "rational":
            if self.num is None or self.den is None:
                raise ValueError("rational spec needs num and den")
            if ComplexPolynomial(self.den).is_zero:
                raise ValueError("rational spec has identically-zero denominator")
        elif self.kind == "mobius":
            vals = (self.a, self.b, self.c, self.d)
            if any(v is None for v in vals):
                raise ValueError("mobius spec needs a, b, c, d")
            if self.a * self.d - self.b * self.c == 0:
                raise InvalidMobius("ad - bc must be nonzero")
        else:
            if self.lam is None or self.alpha is None or self.beta is None:
                raise ValueError("unicritical spec needs lambda, alpha, beta")
            if self.lam == 0 or self.beta == 0:
                raise InvalidParameters("unicritical spec needs lambda != 0 and beta != 0")

    # Underlying function f as a (num, den) pair of polynomials.
    def function_pair(self) -> tuple[ComplexPolynomial, ComplexPolynomial]:
        one = ComplexPolynomial([1.0])
        if self.kind == "polynomial":
            return ComplexPolynomial(self.coefficients), one
        if self.kind == "rational":
            return ComplexPolynomial(self.num), ComplexPolynomial(self.den)
        if self.kind == "mobius":
            return (ComplexPolynomial([self.b, self.a]),
                    ComplexPolynomial([self.d, self.c]))
        lam, alpha, beta = self.lam, self.alpha, self.beta
        return (ComplexPolynomial([lam * alpha * alpha + beta, -2 * lam * alpha, lam]),
                one)


# -- builders -----------------------------------------------------------------


def build_stirling_polynomial(p: ComplexPolynomial) -> RationalMap:
    """Stirling map (z*D - P)/D with D = P' composed with z - P."""
    if p.degree() < 1:
        raise ValueError("need a nonconstant polynomial")
    d = p.derivative().compose(_X - p)
    return RationalMap(_X * d - p, d)


@dataclass(frozen=True)
class StirlingRationalParts:
    """Intermediates of the rational Stirling assembly, for reuse and audits."""

    map: RationalMap
    deflected: ComplexPolynomial      # z*Q - P, the numerator of k = z - P/Q
    q_of_k: ComplexPolynomial         # Q(k) * Q**m
    wronskian: ComplexPolynomial      # (Q(k) P'(k) - P(k) Q'(k)) * Q**(n+m-1)
    q_exponent: int                   # exponent of Q kept in the numerator


def _lift(p: ComplexPolynomial, a: ComplexPolynomial, q: ComplexPolynomial,
          e: int) -> ComplexPolynomial:
    """p(a/q) * q**e as a polynomial; requires e >= deg p."""
    out = ComplexPolynomial()
    apow = ComplexPolynomial([1.0])
    for j, pj in enumerate(p.coeffs):
        out = out + ComplexPolynomial([pj]) * apow * q.pow(e - j)
        apow = apow * a
    return out


def stirling_rational_parts(p: ComplexPolynomial,
                            q: ComplexPolynomial) -> StirlingRationalParts:
    if q.is_zero:
        raise ZeroDivisionError("denominator is identically zero")
    if p.degree() < 0 or (p.degree() < 1 and q.degree() < 1):
        raise ValueError("P/Q must be a nonconstant function with P not zero")
    n = max(int(p.degree()), 0)
    m = max(int(q.degree()), 0)
    a = _X * q - p
    qk = _lift(q, a, q, m)
    pk = _lift(p, a, q, n)
    dp, dq = p.derivative(), q.derivative()
    dpk = _lift(dp, a, q, n - 1) if n >= 1 else ComplexPolynomial()
    dqk = _lift(dq, a, q, m - 1) if m >= 1 else ComplexPolynomial()
    s = qk * dpk - pk * dqk
    if s.is_zero:
        raise ZeroDivisionError("degenerate input: step denominator vanishes identically")
    e = n - m - 2
    numerator = p * qk * qk
    if e >= 0:
        numerator = numerator * q.pow(e)
        den = s
    else:
        den = q.pow(-e) * s
    built = RationalMap(_X * den - numerator, den)
    return StirlingRationalParts(built, a, qk, s, max(e, 0))


def build_stirling_rational(p: ComplexPolynomial, q: ComplexPolynomial) -> RationalMap:
    return stirling_rational_parts(p, q).map


def build_stirling_mobius(a: complex, b: complex, c: complex, d: complex) -> RationalMap:
    """Closed forms for (az+b)/(cz+d); degree 4 when a = 0, degree 5 otherwise."""
    det = a * d - b * c
    if det == 0:
        raise InvalidMobius("ad - bc must be nonzero")
    if c == 0:
        raise InvalidMobius("c must be nonzero (affine input is out of scope)")
    czd = ComplexPolynomial([d, c])
    cube = czd.pow(3)
    if a == 0:
        # z + ((cz+d)^2 - bc)^2 / (c (cz+d)^3)
        core = czd * czd - ComplexPolynomial([b * c])
        den = cube.scale(c)
        return RationalMap(_X * den + core * core, den)
    # z - (az+b)(c^2 z^2 + 2cd z - ac z + d^2 - bc)^2 / ((cz+d)^3 (ad-bc))
    core = ComplexPolynomial([d * d - b * c, 2 * c * d - a * c, c * c])
    den = cube.scale(det)
    return RationalMap(_X * den - ComplexPolynomial([b, a]) * core * core, den)


def build_stirling_unicritical(lam: complex, alpha: complex, beta: complex) -> RationalMap:
    """Closed form for lam*(z-alpha)**2 + beta; reduces to the lam=1, alpha=0 cubic."""
    if lam == 0:
        raise InvalidParameters("lambda must be nonzero")
    f = ComplexPolynomial([lam * alpha * alpha + beta, -2 * lam * alpha, lam])
    den = ComplexPolynomial([alpha * alpha * lam + beta + alpha,
                             -(2 * alpha * lam + 1), lam]).scale(2 * lam)
    return RationalMap(_X * den + f, den)


def build_newton(p: ComplexPolynomial, q: ComplexPolynomial | None = None) -> RationalMap:
    """Newton map z - f/f' for f = P (or P/Q), for the comparison harness."""
    if q is None or q.degree() < 1:
        scale = 1.0 if q is None else q.coeffs[0]
        pp = p if scale == 1.0 else p.scale(1.0 / scale)
        if pp.degree() < 1:
            raise ValueError("need a nonconstant function")
        dp = pp.derivative()
        return RationalMap(_X * dp - pp, dp)
    w = p.derivative() * q - p * q.derivative()
    if w.is_zero:
        raise ZeroDivisionError("f' vanishes identically")
    return RationalMap(_X * w - p * q, w)


def build_map(spec: MapSpec) -> RationalMap:
    """Build the iteration map described by a MapSpec."""
    spec.validate()
    if spec.method == "newton":
        num, den = spec.function_pair()
        return build_newton(num, den)
    if spec.kind == "polynomial":
        return build_stirling_polynomial(ComplexPolynomial(spec.coefficients))
    if spec.kind == "rational":
        return build_stirling_rational(ComplexPolynomial(spec.num),
                                       ComplexPolynomial(spec.den))
    if spec.kind == "mobius":
        return build_stirling_mobius(spec.a, spec.b, spec.c, spec.d)
    return build_stirling_unicritical(spec.lam, spec.alpha, spec.beta)


# -- pointwise numeric steppers (oracles) -------------------------------------


def _f_df_at(spec: MapSpec, z: complex) -> tuple[complex, "callable"]:
    num, den = spec.function_pair()
    dnum, dden = num.derivative(), den.derivative()

    def df(w: complex) -> complex:
        dv = den(w)
        if dv == 0:
            raise PoleEncountered(f"f' undefined at {w!r}")
        return (dnum(w) * dv - num(w) * dden(w)) / (dv * dv)

    dv = den(z)
    if dv == 0:
        raise PoleEncountered(f"f undefined at {z!r}")
    return num(z) / dv, df


def stirling_step_numeric(spec: MapSpec, z: complex) -> complex:
    """One Stirling step z - f(z)/f'(z - f(z)), evaluated pointwise.

    Independent of the symbolic builders; raises PoleEncountered when
    f'(z - f(z)) vanishes (a critical value of the step).
    """
    fz, df = _f_df_at(spec, z)
    w = z - fz
    dfw = df(w)
    if dfw == 0:
        raise PoleEncountered(f"f'(z - f(z)) = 0 at z={z!r}")
    out = z - fz / dfw
    if out != out:  # NaN: overflow inside the quotient
        raise PoleEncountered(f"step overflow at z={z!r}")
    return out


def newton_step_numeric(spec: MapSpec, z: complex) -> complex:
    """One Newton step z - f(z)/f'(z), evaluated pointwise."""
    fz, df = _f_df_at(spec, z)
    dfz = df(z)
    if dfz == 0:
        raise PoleEncountered(f"f'(z) = 0 at z={z!r}")
    return z - fz / dfz


def step_numeric(spec: MapSpec, z: complex) -> complex:
    """Dispatch on spec.method; the oracle matching build_map(spec)."""
    if spec.method == "newton":
        return newton_step_numeric(spec, z)
    return stirling_step_numeric(spec, z)


def _f_derivatives(spec: MapSpec):
    """Pointwise f, f', f'' from the low-degree input pair P/Q.

    f'  = W / Q**2          with W  = P'Q - PQ'
    f'' = (W'Q - 2WQ') / Q**3
    """
    p, q = spec.function_pair()
    w = p.derivative() * q - p * q.derivative()
    w2 = w.derivative() * q - w.scale(2.0) * q.derivative()

    def f(z: complex) -> complex:
        qv = q(z)
        if qv == 0:
            raise PoleEncountered(f"f undefined at {z!r}")
        return p(z) / qv

    def df(z: complex) -> complex:
        qv = q(z)
        if qv == 0:
            raise PoleEncountered(f"f' undefined at {z!r}")
        return w(z) / (qv * qv)

    def ddf(z: complex) -> complex:
        qv = q(z)
        if qv == 0:
            raise PoleEncountered(f"f'' undefined at {z!r}")
        return w2(z) / (qv * qv * qv)

    return f, df, ddf


def stirling_step_derivative(spec: MapSpec, z: complex) -> complex:
    """Exact derivative of the Stirling step, evaluated pointwise.

    With k = z - f(z):  St' = 1 - [f'(z) f'(k) - f(z) f''(k) (1 - f'(z))] / f'(k)**2.
    Evaluating through the original low-degree pair avoids the cancellation
    that plagues the expanded coefficient form of the built map, so this is
    the preferred multiplier oracle at fixed points.
    """
    f, df, ddf = _f_derivatives(spec)
    fz = f(z)
    dfz = df(z)
    k = z - fz
    dfk = df(k)
    if dfk == 0:
        raise PoleEncountered(f"f'(z - f(z)) = 0 at z={z!r}")
    out = 1.0 - (dfz * dfk - fz * ddf(k) * (1.0 - dfz)) / (dfk * dfk)
    if out != out:
        raise PoleEncountered(f"step derivative overflow at z={z!r}")
    return out


def newton_step_derivative(spec: MapSpec, z: complex) -> complex:
    """Exact derivative of the Newton step: N' = f f'' / f'**2."""
    f, df, ddf = _f_derivatives(spec)
    dfz = df(z)
    if dfz == 0:
        raise PoleEncountered(f"f'(z) = 0 at z={z!r}")
    return f(z) * ddf(z) / (dfz * dfz)


def step_derivative_numeric(spec: MapSpec, z: complex) -> complex:
    """Dispatch on spec.method; multiplier oracle matching build_map(spec)."""
    if spec.method == "newton":
        return newton_step_derivative(spec, z)
    return stirling_step_derivative(spec, z)
