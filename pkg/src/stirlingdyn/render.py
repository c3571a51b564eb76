"""Serialize basin rasters to image files with a stable palette.

Binary PPM (P6, maxval 255) is the canonical format: the written bytes are an
exact function of raster + palette.  PNG is convenience output and decodes to
the identical pixel array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .classification import RATIONALLY_INDIFFERENT
from .dynamics import AttractorTable, BasinRaster

# Warm family for attracting basins, blue family for parabolic ones; echoes
# the usual yellow-basin rendering convention for root-finder dynamics.
_WARM = ((247, 214, 32), (255, 244, 150), (240, 150, 24), (196, 255, 110),
         (255, 200, 90), (214, 230, 60))
_COOL = ((44, 90, 196), (120, 170, 255), (24, 140, 170), (90, 110, 230),
         (160, 200, 250), (30, 170, 210))

_MIN_LUMINANCE = 0.25


@dataclass(frozen=True)
class Palette:
    """Deterministic (attractor index, iterations) -> RGB mapping."""

    colors: tuple[tuple[int, int, int], ...]
    max_iter: int
    sentinel: tuple[int, int, int] = (0, 0, 0)

    @classmethod
    def for_attractors(cls, table: AttractorTable, max_iter: int) -> "Palette":
        colors = []
        warm = cool = 0
        for _, classification in table.entries:
            if classification == RATIONALLY_INDIFFERENT:
                colors.append(_COOL[cool % len(_COOL)])
                cool += 1
            else:
                colors.append(_WARM[warm % len(_WARM)])
                warm += 1
        return cls(tuple(colors), max_iter)

    def rgb_array(self, raster: BasinRaster) -> np.ndarray:
        """(H, W, 3) uint8 pixels; luminance falls off with log(1+iterations)."""
        idx = raster.indices
        shade = np.log1p(np.clip(raster.iterations, 0, None)) / np.log1p(max(self.max_iter, 1))
        shade = 1.0 - (1.0 - _MIN_LUMINANCE) * np.minimum(shade, 1.0)
        base = np.zeros((*idx.shape, 3), dtype=np.float64)
        lut = np.array(self.colors or [(0, 0, 0)], dtype=np.float64)
        pos = idx >= 0
        if pos.any():
            base[pos] = lut[idx[pos]] * shade[pos, None]
        base[~pos] = np.asarray(self.sentinel, dtype=np.float64)
        return np.clip(np.rint(base), 0, 255).astype(np.uint8)


class IoFailure(RuntimeError):
    """Image output failed; the message carries the path."""


def write_ppm(raster: BasinRaster, palette: Palette, path) -> None:
    """Binary P6: header "P6\\n{w} {h}\\n255\\n" + row-major RGB bytes."""
    rgb = palette.rgb_array(raster)
    header = f"P6\n{raster.width} {raster.height}\n255\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(rgb.tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write PPM to {path}: {exc}") from exc


def write_png(raster: BasinRaster, palette: Palette, path) -> None:
    rgb = palette.rgb_array(raster)
    try:
        Image.fromarray(rgb, mode="RGB").save(path, format="PNG")
    except OSError as exc:
        raise IoFailure(f"cannot write PNG to {path}: {exc}") from exc


def ppm_bytes(raster: BasinRaster, palette: Palette) -> bytes:
    header = f"P6\n{raster.width} {raster.height}\n255\n".encode("ascii")
    return header + palette.rgb_array(raster).tobytes()
