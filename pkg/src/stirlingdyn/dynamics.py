"""Orbit computation and per-pixel fate classification.

A single vectorized engine drives both single-orbit traces and basin rasters;
per-pixel work is independent and pure, so results are bit-identical
regardless of evaluation order or batching.  Near infinity the engine swaps
to the reciprocal chart w = 1/z (entered when |z| > R_SWITCH), which keeps
polynomial evaluation away from overflow and makes the point at infinity an
ordinary attractor at w = 0.

Fate rules (constants below): geometric capture needs CONV_WINDOW consecutive
iterates within EPS_ATTRACT of an attractor; parabolic capture needs
PARABOLIC_WINDOW consecutive iterates within EPS_PARABOLIC of a rationally
indifferent fixed point with monotone nonincreasing distance, and extends the
iteration budget tenfold.  Parabolic convergence is O(1/n), far slower than
geometric, hence the separate relaxed detector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classification import (ATTRACTING, RATIONALLY_INDIFFERENT, SUPERATTRACTING,
                             FixedPointReport)
from .polynomial import _horner
from .rational import (INFINITY, RationalMap, SpherePoint, conjugate_reciprocal,
                       is_infinite)

EPS_ATTRACT = 1e-8
CONV_WINDOW = 3
EPS_PARABOLIC = 1e-3
PARABOLIC_WINDOW = 20
PARABOLIC_BUDGET_FACTOR = 10
R_SWITCH = 1e6
# Parabolic steps can shrink the distance by less than one ulp of the iterate,
# so |z - z*| jitters by ~eps*|z| between steps.  The monotone check tolerates
# that rounding noise; both allowances sit far below any dynamical growth.
MONOTONE_SLACK = 1e-14
MONOTONE_SLACK_ABS = 1e-13

UNDETERMINED = -1  # raster sentinel: ran out of budget (or hit 0/0)
ESCAPED = -2       # raster sentinel: captured by infinity when it is no attractor

STATUS_CONVERGED = "converged"
STATUS_PARABOLIC = "parabolic"
STATUS_ESCAPED = "escaped_to_infinity"
STATUS_UNDETERMINED = "undetermined"

_CAPTURING_GEOMETRIC = (SUPERATTRACTING, ATTRACTING)


@dataclass(frozen=True)
class AttractorTable:
    """Capture targets: (location, classification) pairs, stable order."""

    entries: tuple[tuple[SpherePoint, str], ...]

    @classmethod
    def from_reports(cls, reports: list[FixedPointReport]) -> "AttractorTable":
        entries: list[tuple[SpherePoint, str]] = []
        for r in reports:
            if r.classification not in (*_CAPTURING_GEOMETRIC, RATIONALLY_INDIFFERENT):
                continue
            duplicate = False
            for loc, _ in entries:
                if is_infinite(loc) or is_infinite(r.location):
                    duplicate = duplicate or (is_infinite(loc) and is_infinite(r.location))
                elif abs(loc - r.location) <= 2 * EPS_ATTRACT:
                    duplicate = True
            if not duplicate:
                entries.append((r.location, r.classification))
        return cls(tuple(entries))

    def has_parabolic(self) -> bool:
        return any(c == RATIONALLY_INDIFFERENT for _, c in self.entries)


@dataclass(frozen=True)
class OrbitResult:
    iterates: tuple[complex, ...]
    status: str
    attractor_index: int | None
    iterations: int


@dataclass(frozen=True)
class BasinRaster:
    """Per-pixel fates over a viewport lattice (row-major, top row = max Im)."""

    width: int
    height: int
    indices: np.ndarray     # (H, W) int32, attractor index or sentinel
    iterations: np.ndarray  # (H, W) int32
    center: complex
    span: float             # width of the viewport along the real axis

    def __post_init__(self):
        for arr in (self.indices, self.iterations):
            arr.setflags(write=False)


def budget_for(table: AttractorTable, max_iter: int) -> int:
    return max_iter * (PARABOLIC_BUDGET_FACTOR if table.has_parabolic() else 1)


def _step_values(num: np.ndarray, den: np.ndarray, v: np.ndarray) -> np.ndarray:
    """num(v)/den(v) with exact poles sent to infinity and 0/0 to NaN."""
    nv = _horner(num, v)
    dv = _horner(den, v)
    pole = dv == 0
    res = nv / np.where(pole, 1.0, dv)
    if pole.any():
        res = np.where(pole & (nv != 0), complex(math.inf, 0.0), res)
        res = np.where(pole & (nv == 0), complex(math.nan, math.nan), res)
    return res


def _engine(f: RationalMap, z0: np.ndarray, table: AttractorTable, max_iter: int,
            record: list | None = None) -> tuple[np.ndarray, np.ndarray]:
    num, den = f.num.coeffs, f.den.coeffs
    if f.num.is_zero:
        gnum = np.zeros(0, dtype=np.complex128)
        gden = np.ones(1, dtype=np.complex128)
    else:
        g = conjugate_reciprocal(f)
        gnum, gden = g.num.coeffs, g.den.coeffs

    geometric: list[tuple[SpherePoint, int]] = []  # (location, fate value)
    parabolic: list[tuple[SpherePoint, int]] = []
    has_inf = False
    for i, (loc, cls) in enumerate(table.entries):
        has_inf = has_inf or is_infinite(loc)
        if cls in _CAPTURING_GEOMETRIC:
            geometric.append((loc, i))
        elif cls == RATIONALLY_INDIFFERENT:
            parabolic.append((loc, i))
    if not has_inf:
        geometric.append((INFINITY, ESCAPED))
    budget = budget_for(table, max_iter)

    n = z0.size
    with np.errstate(all="ignore"):
        val = z0.astype(np.complex128).copy()
        chart = np.abs(val) > R_SWITCH
        if chart.any():
            val[chart] = 1.0 / val[chart]
        fate = np.full(n, UNDETERMINED, np.int32)
        iters = np.full(n, budget, np.int32)
        cand = np.full(n, -1, np.int32)
        streak = np.zeros(n, np.int32)
        first = np.zeros(n, np.int32)
        n_par = len(parabolic)
        last_d = np.full((n_par, n), np.inf)
        pstreak = np.zeros((n_par, n), np.int32)
        pfirst = np.zeros((n_par, n), np.int32)
        geo_fates = np.array([fv for _, fv in geometric], np.int32)
        idx = np.arange(n)

        for k in range(budget + 1):
            va = val[idx]
            ch = chart[idx]
            if record is not None and idx.size:
                w = complex(va[0])
                if ch[0]:
                    z = 1.0 / w if w != 0 else complex(math.inf, 0.0)
                else:
                    z = w
                record.append(z)
            dead = np.isnan(va.real) | np.isnan(va.imag)
            absv = np.abs(va)
            dist_inf = np.where(ch, absv, 1.0 / absv)
            resolved = np.zeros(idx.size, bool)

            if geometric:
                dmat = np.empty((len(geometric), idx.size))
                for r, (loc, _fv) in enumerate(geometric):
                    if is_infinite(loc):
                        dmat[r] = dist_inf
                    else:
                        dmat[r] = np.where(ch, np.inf, np.abs(va - loc))
                dmat = np.where(np.isnan(dmat), np.inf, dmat)
                best = np.argmin(dmat, axis=0).astype(np.int32)
                dbest = np.take_along_axis(dmat, best[None, :], 0)[0]
                hit = dbest < EPS_ATTRACT
                c0 = cand[idx]
                same = hit & (best == c0)
                s1 = np.where(same, streak[idx] + 1, np.where(hit, 1, 0))
                first[idx] = np.where(hit & ~same, k, first[idx])
                cand[idx] = np.where(hit, best, -1)
                streak[idx] = s1
                confirm = s1 >= CONV_WINDOW
                if confirm.any():
                    sel = idx[confirm]
                    fate[sel] = geo_fates[best[confirm]]
                    iters[sel] = first[sel]
                    resolved |= confirm

            for j, (loc, ti) in enumerate(parabolic):
                dj = dist_inf if is_infinite(loc) else np.where(ch, np.inf,
                                                                np.abs(va - loc))
                dj = np.where(np.isnan(dj), np.inf, dj)
                ok = ((dj < EPS_PARABOLIC)
                      & (dj <= last_d[j, idx] * (1.0 + MONOTONE_SLACK)
                         + MONOTONE_SLACK_ABS)
                      & ~resolved & ~dead)
                ps0 = pstreak[j, idx]
                pfirst[j, idx] = np.where(ok & (ps0 == 0), k, pfirst[j, idx])
                ps1 = np.where(ok, ps0 + 1, 0)
                pstreak[j, idx] = ps1
                last_d[j, idx] = dj
                confirm = (ps1 >= PARABOLIC_WINDOW) & ~resolved
                if confirm.any():
                    sel = idx[confirm]
                    fate[sel] = ti
                    iters[sel] = pfirst[j, sel]
                    resolved |= confirm

            dd = dead & ~resolved
            if dd.any():
                iters[idx[dd]] = k  # 0/0 along the orbit: undetermined, not fatal
                resolved |= dd

            idx = idx[~resolved]
            if idx.size == 0 or k == budget:
                break

            va = val[idx]
            ch = chart[idx]
            out = np.empty_like(va)
            mz = ~ch
            if mz.any():
                out[mz] = _step_values(num, den, va[mz])
            if ch.any():
                out[ch] = _step_values(gnum, gden, va[ch])
            # exact pole hits and overflow both land on the point at infinity
            blown = np.isinf(out.real) | np.isinf(out.imag)
            if blown.any():
                out[blown] = complex(math.inf, 0.0)
            absn = np.abs(out)
            to_chart = mz & ((absn > R_SWITCH) | blown)
            leave = ch & ((absn > 1.0 / R_SWITCH) | blown)
            flip = to_chart | leave
            if flip.any():
                out[flip] = 1.0 / out[flip]
            chart[idx] = (ch | to_chart) & ~leave
            val[idx] = out

    return fate, iters


def iterate_orbit(f: RationalMap, z0: complex, attractors: AttractorTable,
                  max_iter: int) -> OrbitResult:
    """Iterate f from z0 and classify the orbit's fate."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    record: list[complex] = []
    fate, iters = _engine(f, np.array([z0], np.complex128), attractors, max_iter,
                          record)
    fv, it = int(fate[0]), int(iters[0])
    if fv >= 0:
        cls = attractors.entries[fv][1]
        status = STATUS_PARABOLIC if cls == RATIONALLY_INDIFFERENT else STATUS_CONVERGED
        return OrbitResult(tuple(record), status, fv, it)
    if fv == ESCAPED:
        return OrbitResult(tuple(record), STATUS_ESCAPED, None, it)
    return OrbitResult(tuple(record), STATUS_UNDETERMINED, None, it)


def classify_grid(f: RationalMap, attractors: AttractorTable,
                  viewport: tuple[complex, float], resolution: tuple[int, int],
                  max_iter: int = 200) -> BasinRaster:
    """Per-pixel fates over the viewport lattice (pixel centers, square pixels).

    resolution is (width, height) in pixels; the viewport is (center, width
    along the real axis).  Row-major output, top row at maximal imaginary
    part.  Deterministic: identical inputs give bit-identical rasters.
    """
    w_px, h_px = resolution
    if w_px < 1 or h_px < 1:
        raise ValueError("resolution must be at least 1x1")
    center, span = viewport
    center = complex(center)
    step = span / w_px
    # (j - W/2 + 0.5) and (H/2 - i - 0.5) are exact halves: the lattice is
    # exactly antisymmetric about the axes when the center sits on them.
    xs = (np.arange(w_px) - (w_px / 2) + 0.5) * step + center.real
    ys = ((h_px / 2) - np.arange(h_px) - 0.5) * step + center.imag
    z0 = (xs[None, :] + 1j * ys[:, None]).ravel()
    fate, iters = _engine(f, z0, attractors, max_iter)
    return BasinRaster(w_px, h_px, fate.reshape(h_px, w_px),
                       iters.reshape(h_px, w_px), center, span)


def conjugation_permutation(table: AttractorTable) -> list[int] | None:
    """Index map sending each attractor to its complex conjugate, if total."""
    perm: list[int] = []
    for loc, _ in table.entries:
        target = None
        for j, (other, _) in enumerate(table.entries):
            if is_infinite(loc) and is_infinite(other):
                target = j
                break
            if not is_infinite(loc) and not is_infinite(other) \
                    and abs(other - loc.conjugate()) <= 2 * EPS_ATTRACT:
                target = j
                break
        if target is None:
            return None
        perm.append(target)
    return perm


def conjugate_flip(raster: BasinRaster, permutation: list[int]) -> BasinRaster:
    """Mirror the raster across the real axis, permuting attractor indices."""
    lut = np.asarray(permutation, np.int32)
    flipped = raster.indices[::-1].copy()
    pos = flipped >= 0
    flipped[pos] = lut[flipped[pos]]
    return BasinRaster(raster.width, raster.height, flipped,
                       raster.iterations[::-1].copy(), raster.center, raster.span)
