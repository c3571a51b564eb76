"""Dense complex-coefficient polynomials with simultaneous root finding.

Coefficients are stored in ascending order: ``coeffs[i]`` multiplies ``z**i``.
The zero polynomial is the empty coefficient vector; its degree is ``-inf``.
All values are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TRIM_TOL = 1e-12           # trailing coefficients below TRIM_TOL * max|c| are dropped
ROOT_RESIDUAL_TOL = 1e-8   # relative residual accepted for a polished root
CLUSTER_RADIUS = 1e-6      # final merge radius for root clusters

_MAX_SWEEPS = 500
_STEP_TOL = 1e-13
_STAGNANT_SWEEPS = 60
_MULT_EPS = 1e-7           # relative threshold for "derivative vanishes here"

# Fixed jitter for the initial root circle keeps every run bit-identical while
# breaking the symmetric stalls Aberth suffers on e.g. z^n - c.
_JITTER = np.random.default_rng(0x57E11).uniform(-0.15, 0.15, size=512)


class NonConvergence(RuntimeError):
    """The root finder could not meet the residual tolerance."""


def _horner(coeffs: np.ndarray, z):
    """Evaluate ascending coefficients at ``z`` (scalar or ndarray)."""
    if len(coeffs) == 0:
        return np.zeros_like(z) if isinstance(z, np.ndarray) else 0j
    if isinstance(z, np.ndarray):
        acc = np.full(z.shape, coeffs[-1], dtype=np.complex128)
        for a in coeffs[-2::-1]:
            acc = acc * z + a
        return acc
    acc = complex(coeffs[-1])
    zc = complex(z)
    for a in coeffs[-2::-1]:
        acc = acc * zc + complex(a)
    return acc


def _eval_scale(coeffs: np.ndarray, z: complex) -> float:
    """Horner magnitude sum: natural backward-error scale of evaluation at z."""
    if len(coeffs) == 0:
        return 0.0
    az = abs(z)
    acc = 0.0
    for a in np.abs(coeffs[::-1]).tolist():  # python floats: quiet overflow to inf
        acc = acc * az + a
    return acc


class ComplexPolynomial:
    """Immutable dense polynomial over complex128."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        arr = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                         dtype=np.complex128).ravel()
        if arr.size:
            top = float(np.abs(arr).max())
            if top == 0.0:
                arr = arr[:0]
            else:
                keep = np.abs(arr) > TRIM_TOL * top
                arr = arr[: int(np.max(np.nonzero(keep))) + 1]
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexPolynomial is immutable")

    # -- structure ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def degree(self):
        """Degree as an int, or -inf for the zero polynomial."""
        return self.coeffs.size - 1 if self.coeffs.size else -math.inf

    @property
    def leading(self) -> complex:
        if self.is_zero:
            return 0j
        return complex(self.coeffs[-1])

    @classmethod
    def from_roots(cls, roots, leading: complex = 1.0) -> "ComplexPolynomial":
        p = cls([leading])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    # -- ring operations ----------------------------------------------------

    def __call__(self, z):
        return _horner(self.coeffs, z)

    def __add__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        a, b = self.coeffs, other.coeffs
        n = max(a.size, b.size)
        out = np.zeros(n, dtype=np.complex128)
        out[: a.size] += a
        out[: b.size] += b
        return ComplexPolynomial(out)

    def __sub__(self, other: "ComplexPolynomial") -> "ComplexPolynomial":
        return self + (-other)

    def __neg__(self) -> "ComplexPolynomial":
        return ComplexPolynomial(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, ComplexPolynomial):
            if self.is_zero or other.is_zero:
                return ComplexPolynomial()
            return ComplexPolynomial(np.convolve(self.coeffs, other.coeffs))
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, factor: complex) -> "ComplexPolynomial":
        return ComplexPolynomial(self.coeffs * complex(factor))

    def compose(self, inner: "ComplexPolynomial") -> "ComplexPolynomial":
        """Return self(inner(z)) by Horner in the polynomial ring."""
        if self.is_zero:
            return ComplexPolynomial()
        acc = ComplexPolynomial([self.coeffs[-1]])
        for a in self.coeffs[-2::-1]:
            acc = acc * inner + ComplexPolynomial([a])
        return acc

    def derivative(self) -> "ComplexPolynomial":
        if self.coeffs.size <= 1:
            return ComplexPolynomial()
        return ComplexPolynomial(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def pow(self, n: int) -> "ComplexPolynomial":
        out = ComplexPolynomial([1.0])
        for _ in range(n):
            out = out * self
        return out

    # -- misc ---------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, ComplexPolynomial):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"ComplexPolynomial({self.coeffs.tolist()!r})"

    # -- root finding ---------------------------------------------------------

    def roots(self) -> "RootSet":
        """All roots with multiplicity.

        Simultaneous Aberth-Ehrlich iteration from a jittered initial circle;
        each approximation is then polished by Newton steps with a
        multiplicity-aware fallback (Newton on the (m-1)-th derivative) so
        that the eps**(1/m) scatter around a multiple root collapses onto its
        true location before nearby approximations are merged into
        multiplicities.

        Raises NonConvergence when the relative residual tolerance is unmet.
        """
        if self.degree() < 1:
            raise ValueError("roots() requires degree >= 1")
        c = self.coeffs
        # exact monomial factor -> exact root at the origin
        k0 = 0
        while k0 < c.size - 1 and c[k0] == 0:
            k0 += 1
        c = c[k0:]
        found: list[tuple[complex, int]] = []
        if k0:
            found.append((0j, k0))
        d = c.size - 1
        if d == 1:
            found.append((complex(-c[0] / c[1]), 1))
        elif d >= 2:
            # balance the variable scale first: with s near the geometric
            # mean of the root magnitudes the initial Cauchy circle stays
            # modest even when the raw coefficients span many decades
            s = float(abs(c[0] / c[-1]) ** (1.0 / d))
            if not math.isfinite(s) or s == 0.0:
                s = 1.0
            s = min(max(s, 1e-6), 1e6)
            balanced = c * s ** np.arange(c.size)
            balanced = balanced / np.abs(balanced).max()
            approx = s * _aberth(balanced)
            ders = _derivative_chain(c)
            refined = [(_refine_root(complex(x), ders), 1) for x in approx]
            # merged centroids sit much closer to a multiple root than the
            # individual approximations did: refine once more from there
            found.extend((_refine_root(loc, ders), mult) if mult > 1 else (loc, mult)
                         for loc, mult in _merge_close(refined))
        found = _merge_close(found)
        found.sort(key=lambda rm: (rm[0].real, rm[0].imag))

        residual = 0.0
        for r, _m in found:
            val = abs(self(r))
            scale = _eval_scale(self.coeffs, r) or 1.0
            if val > ROOT_RESIDUAL_TOL * scale:
                raise NonConvergence(
                    f"root residual {val:.3e} exceeds {ROOT_RESIDUAL_TOL:.1e} * {scale:.3e} "
                    f"at z={r!r} (degree {self.degree()})")
            residual = max(residual, val)
        return RootSet(tuple(found), residual)


@dataclass(frozen=True)
class RootSet:
    """Roots with multiplicities plus the worst absolute residual."""

    roots: tuple[tuple[complex, int], ...]
    residual: float

    @property
    def locations(self) -> tuple[complex, ...]:
        return tuple(r for r, _ in self.roots)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.roots)

    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots)


# -- internals ---------------------------------------------------------------


def _poly_deriv(c: np.ndarray) -> np.ndarray:
    if c.size <= 1:
        return np.zeros(0, dtype=np.complex128)
    return c[1:] * np.arange(1, c.size)


def _derivative_chain(c: np.ndarray) -> list[np.ndarray]:
    chain = [c]
    while chain[-1].size > 1:
        chain.append(_poly_deriv(chain[-1]))
    return chain


def _aberth(c: np.ndarray) -> np.ndarray:
    d = c.size - 1
    lead = c[-1]
    radius = 1.0 + float(np.abs(c[:-1] / lead).max())
    k = np.arange(d)
    angles = 2.0 * np.pi * (k + 0.5) / d + _JITTER[k % _JITTER.size] / d
    x = radius * np.exp(1j * angles)
    dc = _poly_deriv(c)
    best = math.inf
    idle = 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for _ in range(_MAX_SWEEPS):
            p = _horner(c, x)
            dp = _horner(dc, x)
            bad = dp == 0
            if bad.any():
                dp = np.where(bad, 1.0, dp)
            w = p / dp
            diff = x[:, None] - x[None, :]
            np.fill_diagonal(diff, np.inf)
            s = (1.0 / diff).sum(axis=1)
            denom = 1.0 - w * s
            step = np.where(denom != 0, w / np.where(denom != 0, denom, 1.0), w)
            step = np.where(np.isfinite(step), step, 0.0)
            x = x - step
            rel = float((np.abs(step) / (1.0 + np.abs(x))).max())
            if rel < _STEP_TOL:
                break
            if rel < 0.9 * best:
                best = rel
                idle = 0
            elif rel < 1e-6:
                # steps this small that stop shrinking are multiple-root
                # jitter at the noise floor; refinement takes over from here
                idle += 1
                if idle > _STAGNANT_SWEEPS:
                    break
            else:
                idle = 0
    return x


def _newton_polish(c: np.ndarray, dc: np.ndarray, z: complex, steps: int) -> complex:
    for _ in range(steps):
        dp = _horner(dc, z)
        if dp == 0:
            break
        delta = _horner(c, z) / dp
        if not np.isfinite(delta.real) or not np.isfinite(delta.imag):
            break
        z = z - delta
        if abs(delta) < 1e-16 * (1.0 + abs(z)):
            break
    return complex(z)


def _local_multiplicity(z: complex, ders: list[np.ndarray]) -> int:
    for j, cj in enumerate(ders):
        val = abs(_horner(cj, z))
        scale = _eval_scale(cj, z)
        if scale == 0.0 or val > _MULT_EPS * scale:
            return max(j, 1)
    return max(len(ders) - 1, 1)


def _refine_root(x: complex, ders: list[np.ndarray]) -> complex:
    """Polish one approximation, allowing for a multiple root underneath.

    An approximation near a multiplicity-m root sits on an eps**(1/m)
    scatter where plain Newton stalls; Newton on the (m-1)-th derivative
    converges to the exact location instead.  Since a cheap multiplicity
    estimate is unreliable for ill-conditioned polynomials, every plausible
    m is tried and a candidate is accepted only when it stays within a leash
    proportional to the local Newton correction (so it cannot wander to a
    different root) and beats the plain polish's residual.
    """
    c = ders[0]
    local = 0.05 * (1.0 + abs(x))
    plain = _newton_polish(c, ders[1], x, 80)
    if not abs(plain - x) <= local:
        plain = x  # below the noise floor Newton random-walks; stay put
    base = abs(_horner(c, plain))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        dp = _horner(ders[1], x)
        w = abs(_horner(c, x) / dp) if dp != 0 else math.inf
    leash = min(local, 300.0 * (w + 1e-15 * (1.0 + abs(x))))
    # Near a multiple root the polynomial is flat enough that computed
    # residuals within the whole scatter disc sit at (or below) the Horner
    # rounding noise, so acceptance compares against that noise floor, and
    # the residual cannot *rank* admissible candidates: the highest
    # admissible m wins, since its polish target has the sharpest root.
    noise = 32.0 * c.size * 2.220446049250313e-16 * _eval_scale(c, x)
    best = plain
    for m in range(2, min(6, len(ders) - 1) + 1):
        target = ders[m - 1]
        dtarget = ders[m] if m < len(ders) else np.zeros(0, dtype=np.complex128)
        cand = _newton_polish(target, dtarget, x, 80)
        res = abs(_horner(c, cand))
        if abs(cand - x) <= leash and res <= 4.0 * base + noise:
            best = cand
    return best


def _merge_close(found: list[tuple[complex, int]]) -> list[tuple[complex, int]]:
    merged: list[tuple[complex, int]] = []
    for r, m in sorted(found, key=lambda rm: (rm[0].real, rm[0].imag)):
        for i, (r0, m0) in enumerate(merged):
            if abs(r - r0) <= CLUSTER_RADIUS:
                w = (r0 * m0 + r * m) / (m0 + m)
                merged[i] = (w, m0 + m)
                break
        else:
            merged.append((r, m))
    return merged
