"""Smooth escape-time rendering of Julia sets for z -> z**d + c."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .colormaps import ColorMap

DEFAULT_MAX_ITER = 300
DEFAULT_RADIUS = 4.0
DEFAULT_VIEWPORT = (-1.5, 1.5, -1.5, 1.5)
# value = nu / max_iter ("linear") or log1p(nu) / log1p(max_iter) ("log")
NORMALIZATIONS = ("linear", "log")


@dataclass(frozen=True)
class RenderSpec:
    width: int
    height: int
    c: complex
    power: int = 2
    max_iter: int = DEFAULT_MAX_ITER
    escape_radius: float = DEFAULT_RADIUS
    viewport: tuple[float, float, float, float] = DEFAULT_VIEWPORT
    normalization: str = "linear"

    def __post_init__(self):
        re_min, re_max, im_min, im_max = self.viewport
        problems = []
        if self.width < 16 or self.height < 16:
            problems.append("width and height must be >= 16")
        if not self.escape_radius > 1:
            problems.append("escape radius must exceed 1")
        if not (re_min < re_max and im_min < im_max):
            problems.append("viewport must have re_min < re_max and im_min < im_max")
        if self.max_iter < 10:
            problems.append("max_iter must be >= 10")
        if self.power < 2:
            problems.append("power must be >= 2")
        if not all(math.isfinite(v) for v in (*self.viewport, self.c.real, self.c.imag)):
            problems.append("viewport and c must be finite")
        if self.normalization not in NORMALIZATIONS:
            problems.append(f"normalization must be one of {NORMALIZATIONS}")
        if problems:
            raise ValueError("invalid render spec: " + "; ".join(problems))


@dataclass(frozen=True, eq=False)
class SmoothField:
    """Row-major ``(height, width)`` array of values in [0, 1]; 1.0 marks the interior."""

    width: int
    height: int
    values: np.ndarray


@njit(cache=True, nogil=True)
def _escape(zr, zi, cr, ci, d, radius, max_iter):
    r2 = radius * radius
    log_r = math.log(radius)
    log_d = math.log(d)
    for n in range(max_iter + 1):
        m2 = zr * zr + zi * zi
        if m2 > r2:
            nu = n + 1.0 - math.log(0.5 * math.log(m2) / log_r) / log_d
            return nu if nu > 0.0 else 0.0
        if n == max_iter:
            break
        wr = zr
        wi = zi
        for _ in range(d - 1):
            t = wr * zr - wi * zi
            wi = wr * zi + wi * zr
            wr = t
        zr = wr + cr
        zi = wi + ci
    return -1.0


@njit(cache=True, nogil=True)
def _render_rows(out, row0, row1, re_min, re_max, im_min, im_max, cr, ci, d, radius, max_iter,
                 log_scale):
    height, width = out.shape
    log_top = math.log1p(max_iter)
    re_span = re_max - re_min
    im_span = im_max - im_min
    for py in range(row0, row1):
        zi0 = im_max - (py + 0.5) * im_span / height
        for px in range(width):
            zr0 = re_min + (px + 0.5) * re_span / width
            nu = _escape(zr0, zi0, cr, ci, d, radius, max_iter)
            if nu < 0.0:
                out[py, px] = 1.0
            else:
                v = math.log1p(nu) / log_top if log_scale else nu / max_iter
                out[py, px] = v if v < 1.0 else 1.0


def escape_time_point(z0: complex, c: complex, d: int = 2, radius: float = DEFAULT_RADIUS,
                      max_iter: int = DEFAULT_MAX_ITER) -> float | None:
    """Smooth escape count for one orbit, or ``None`` if it never leaves the disk of ``radius``.

    The count is ``n + 1 - log_d(ln|z_n| / ln R)`` for the first ``z_n``
    (``z_0`` included) outside the disk, clamped below at 0.
    """
    if not radius > 1 or d < 2:
        raise ValueError("need radius > 1 and d >= 2")
    z0, c = complex(z0), complex(c)
    nu = _escape(z0.real, z0.imag, c.real, c.imag, int(d), float(radius), int(max_iter))
    return None if nu < 0.0 else nu


def render_field(spec: RenderSpec, workers: int = 1) -> SmoothField:
    """Render the normalized smooth field; rows may be split across ``workers`` threads.

    Pixel ``(px, py)`` samples ``z0`` at its cell center, top row at ``im_max``.
    Interior pixels get exactly 1.0; escaping ones get the normalized smooth
    count clamped to [0, 1].
    """
    out = np.empty((spec.height, spec.width), dtype=np.float64)
    args = (*map(float, spec.viewport), float(spec.c.real), float(spec.c.imag),
            int(spec.power), float(spec.escape_radius), int(spec.max_iter),
            spec.normalization == "log")
    workers = max(1, min(int(workers), spec.height))
    if workers == 1:
        _render_rows(out, 0, spec.height, *args)
    else:
        bounds = np.linspace(0, spec.height, workers + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            jobs = [pool.submit(_render_rows, out, int(a), int(b), *args)
                    for a, b in zip(bounds[:-1], bounds[1:])]
            for job in jobs:
                job.result()
    return SmoothField(spec.width, spec.height, out)


def colorize(field: SmoothField, cmap: ColorMap) -> np.ndarray:
    """Map field values to ``lut[round(v * 255)]`` (round half up)."""
    idx = np.floor(np.clip(field.values, 0.0, 1.0) * 255.0 + 0.5).astype(np.intp)
    return cmap.lut[idx]
