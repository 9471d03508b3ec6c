"""Raster output: quadrant plots, basins of attraction, spiral overlays, PPM files.

Quadrant plots color each pixel by the quadrant of ``f(w)`` and by whether
``f(w)`` lies in the disk ``|f| <= r`` (rich) or outside it (pale); points
on an axis are black.  Zeros show up as junctions of four rich colors,
poles as junctions of four pale ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np

from .spirals import eversion_embed
from .variants import GenericFunction
from .zeta import OVERFLOW, zeta_array

__all__ = [
    "Code",
    "PALETTE",
    "PlotRegion",
    "QuadrantImage",
    "BasinParams",
    "BasinImage",
    "OverlayImage",
    "A_PHI",
    "COMPLEMENT_A_INFINITY",
    "quadrant_code",
    "quadrant_codes",
    "quadrant_plot",
    "basin_plot",
    "spiral_overlay",
    "write_ppm",
    "ppm_bytes",
]

A_PHI = "A_PHI"
COMPLEMENT_A_INFINITY = "COMPLEMENT_A_INFINITY"
PHI = -0.295905  # largest negative zeta fixed point, to six places


class Code(IntEnum):
    BLACK = 0
    RICH_BLUE = 1
    PALE_BLUE = 2
    RICH_RED = 3
    PALE_RED = 4
    RICH_YELLOW = 5
    PALE_YELLOW = 6
    RICH_GREEN = 7
    PALE_GREEN = 8


PALETTE = np.array([
    (0, 0, 0),
    (0, 0, 255),
    (170, 170, 255),
    (255, 0, 0),
    (255, 170, 170),
    (255, 215, 0),
    (255, 255, 170),
    (0, 160, 0),
    (170, 255, 170),
], dtype=np.uint8)

WHITE = (255, 255, 255)
RED = (255, 0, 0)
BLUE = (0, 0, 255)


@dataclass(frozen=True)
class PlotRegion:
    """A rectangle of the plane sampled at pixel centers; row 0 is the top."""

    center: complex
    width: float
    height: float
    px_width: int
    px_height: int

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not (self.width > 0 and self.height > 0):
            raise ValueError("width and height must be positive")
        if self.px_width < 1 or self.px_height < 1:
            raise ValueError("pixel dimensions must be positive")

    def point(self, i: int, j: int) -> complex:
        """Plane point at the center of column ``i``, row ``j``."""
        re = ((i + 0.5) / self.px_width - 0.5) * self.width
        im = (0.5 - (j + 0.5) / self.px_height) * self.height
        return self.center + complex(re, im)

    def grid(self) -> np.ndarray:
        """(px_height, px_width) array of pixel-center points."""
        re = ((np.arange(self.px_width) + 0.5) / self.px_width - 0.5) * self.width
        im = (0.5 - (np.arange(self.px_height) + 0.5) / self.px_height) * self.height
        return self.center + re[None, :] + 1j * im[:, None]

    def pixel_of(self, w: complex) -> tuple[float, float]:
        """Fractional (column, row) of ``w``; inverse of :meth:`point`."""
        d = complex(w) - self.center
        i = (d.real / self.width + 0.5) * self.px_width - 0.5
        j = (0.5 - d.imag / self.height) * self.px_height - 0.5
        return i, j

    def nearest_pixel(self, w: complex) -> tuple[int, int]:
        i, j = self.pixel_of(w)
        return (min(self.px_width - 1, max(0, int(math.floor(i + 0.5)))),
                min(self.px_height - 1, max(0, int(math.floor(j + 0.5)))))


@dataclass
class QuadrantImage:
    region: PlotRegion
    codes: np.ndarray  # uint8, (px_height, px_width)
    report: dict = field(default_factory=dict)

    def rgb(self) -> np.ndarray:
        return PALETTE[self.codes]

    def neighborhood(self, w: complex) -> set:
        """Codes in the 3x3 block around the pixel nearest ``w``."""
        i, j = self.region.nearest_pixel(w)
        block = self.codes[max(0, j - 1):j + 2, max(0, i - 1):i + 2]
        return {Code(int(c)) for c in block.ravel()}


# --------------------------------------------------------------------------
# quadrant plots


def quadrant_code(value: complex, disk_radius: float = 10.0, axis_tol: float = 0.0) -> Code:
    """Table-1 code of a single value."""
    return Code(int(quadrant_codes(np.array([value]), disk_radius, axis_tol)[0]))


def quadrant_codes(values, disk_radius: float = 10.0, axis_tol: float = 0.0) -> np.ndarray:
    """Table-1 codes of an array of values (non-finite values give BLACK)."""
    v = np.asarray(values, dtype=complex)
    re, im = v.real, v.imag
    with np.errstate(invalid="ignore", over="ignore"):
        mag = np.abs(v)
        band = axis_tol * (1.0 + mag)
        on_axis = (np.abs(re) <= band) | (np.abs(im) <= band)
        quad = np.where(re > 0, np.where(im > 0, 0, 3), np.where(im > 0, 1, 2))
        pale = ~(mag <= disk_radius)
    codes = (1 + 2 * quad + pale).astype(np.uint8)
    codes[on_axis | ~np.isfinite(v)] = Code.BLACK
    return codes


def quadrant_plot(f: GenericFunction, region: PlotRegion, disk_radius: float = 10.0,
                  axis_tol: float = 0.0) -> QuadrantImage:
    """Color every pixel of ``region`` by the quadrant of ``f`` at its center.

    A pixel whose value is not finite is treated as a pole: ``f`` is
    re-evaluated at a point a thousandth of a pixel away and the pixel gets
    the pale code of that direction.  If that also fails the pixel is BLACK.
    ``report`` counts both cases.
    """
    w = region.grid()
    with np.errstate(all="ignore"):
        vals = f.evaluate_array(w)
    vals = np.where(vals == OVERFLOW, complex(math.nan, math.nan), vals)
    codes = quadrant_codes(vals, disk_radius, axis_tol)
    bad = ~np.isfinite(vals)
    poles = failed = 0
    if bad.any():
        h = 1e-3 * min(region.width / region.px_width, region.height / region.px_height)
        nudged = f.evaluate_array(w[bad] + complex(h, h))
        ok = np.isfinite(nudged) & (nudged != OVERFLOW)
        pale = quadrant_codes(nudged, disk_radius, axis_tol)
        # a pole's neighbourhood is outside the disk however small the offset
        pale = np.where((pale % 2 == 1) & (pale > 0), pale + 1, pale)
        sub = codes[bad]
        sub[ok] = pale[ok]
        sub[~ok] = Code.BLACK
        codes[bad] = sub
        poles, failed = int(ok.sum()), int((~ok).sum())
    counts = {c.name: int(np.sum(codes == c)) for c in Code}
    report = {"poles": poles, "failed": failed, "counts": counts,
              "disk_radius": disk_radius, "axis_tol": axis_tol}
    return QuadrantImage(region, codes, report)


# --------------------------------------------------------------------------
# basins


@dataclass(frozen=True)
class BasinParams:
    mode: str = A_PHI
    max_iter: int = 400
    escape_radius: float = 1e6
    attract_tol: float = 1e-6
    phi: complex = complex(PHI)

    def __post_init__(self):
        if self.mode not in (A_PHI, COMPLEMENT_A_INFINITY):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.max_iter < 50:
            raise ValueError("max_iter must be at least 50")
        if self.escape_radius < 100:
            raise ValueError("escape_radius must be at least 100")
        if not self.attract_tol > 0:
            raise ValueError("attract_tol must be positive")


@dataclass
class BasinImage:
    region: PlotRegion
    params: BasinParams
    marked: np.ndarray
    unresolved: np.ndarray
    first_hit: np.ndarray  # iteration of first arrival near phi, -1 if none

    def rgb(self, marked=(0, 0, 0), unmarked=WHITE, unresolved=(255, 0, 0)) -> np.ndarray:
        out = np.empty(self.marked.shape + (3,), dtype=np.uint8)
        out[...] = unmarked
        out[self.marked] = marked
        out[self.unresolved] = unresolved
        return out


STAY = 3


def basin_plot(params: BasinParams, region: PlotRegion) -> BasinImage:
    """Iterate zeta from every pixel center.

    A_PHI marks ``w`` once an iterate is within ``attract_tol`` of ``phi``
    and the next three stay within.  COMPLEMENT_A_INFINITY marks ``w`` when
    no iterate up to ``max_iter`` leaves the escape disk; orbits that have
    settled at the attracting ``phi`` are marked early since they stay
    bounded.  Orbits that hit the pole are unresolved.
    """
    w0 = region.grid().ravel()
    n = w0.size
    marked = np.zeros(n, bool)
    unresolved = np.zeros(n, bool)
    first = np.full(n, -1, np.int64)
    streak = np.zeros(n, np.int64)
    idx = np.arange(n)
    w = w0.copy()
    phi = complex(params.phi)
    for it in range(params.max_iter + 1):
        if idx.size == 0:
            break
        near = np.abs(w - phi) <= params.attract_tol
        streak = np.where(near, streak + 1, 0)
        hit = near & (first[idx] < 0)
        first[idx[hit]] = it
        done = streak > STAY
        marked[idx[done]] = True
        pole = ~np.isfinite(w)
        unresolved[idx[pole]] = True
        escaped = np.abs(w) > params.escape_radius
        keep = ~(done | pole | escaped)
        if it == params.max_iter:
            if params.mode == COMPLEMENT_A_INFINITY:
                marked[idx[keep]] = True
            break
        idx, w, streak = idx[keep], w[keep], streak[keep]
        with np.errstate(all="ignore"):
            w = zeta_array(w)
        # overflow is an escape, not a pole
        w = np.where(w == OVERFLOW, complex(1e300, 0.0), w)
    shape = (region.px_height, region.px_width)
    return BasinImage(region, params, marked.reshape(shape), unresolved.reshape(shape), first.reshape(shape))


# --------------------------------------------------------------------------
# spiral overlays


@dataclass
class OverlayImage:
    region: PlotRegion
    pixels: np.ndarray  # (h, w, 3) uint8
    markers: int
    chords: int

    def rgb(self) -> np.ndarray:
        return self.pixels


def _segment(img, p, q, color):
    (x0, y0), (x1, y1) = p, q
    steps = int(max(abs(x1 - x0), abs(y1 - y0))) + 1
    xs = np.rint(np.linspace(x0, x1, steps + 1)).astype(int)
    ys = np.rint(np.linspace(y0, y1, steps + 1)).astype(int)
    h, w = img.shape[:2]
    ok = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
    img[ys[ok], xs[ok]] = color


def _fit_region(pts: np.ndarray, px: int) -> PlotRegion:
    lo_r, hi_r = pts.real.min(), pts.real.max()
    lo_i, hi_i = pts.imag.min(), pts.imag.max()
    span = max(hi_r - lo_r, hi_i - lo_i, 1e-12) * 1.1
    return PlotRegion(complex((lo_r + hi_r) / 2, (lo_i + hi_i) / 2), span, span, px, px)


def spiral_overlay(points, center=None, region: PlotRegion | None = None, evert: bool = True,
                   marker_radius: int = 1, px: int = 400) -> OverlayImage:
    """Red markers at the (everted) points joined by blue chords on white.

    Without a ``region`` the image is fitted to the embedded points.
    """
    if evert:
        pts = eversion_embed(points, center)
    else:
        pts = np.asarray(points, dtype=complex)
    if pts.size < 2:
        raise ValueError("need at least two points")
    if region is None:
        region = _fit_region(pts, px)
    img = np.empty((region.px_height, region.px_width, 3), dtype=np.uint8)
    img[...] = WHITE
    pix = [region.pixel_of(p) for p in pts]
    for a, b in zip(pix, pix[1:]):
        _segment(img, a, b, BLUE)
    h, w = img.shape[:2]
    for x, y in pix:
        xi, yi = int(round(x)), int(round(y))
        img[max(0, yi - marker_radius):max(0, yi + marker_radius + 1),
            max(0, xi - marker_radius):max(0, xi + marker_radius + 1)] = RED
    return OverlayImage(region, img, len(pix), len(pix) - 1)


# --------------------------------------------------------------------------
# PPM


def _as_rgb(image) -> np.ndarray:
    if hasattr(image, "rgb"):
        rgb = image.rgb()
    else:
        arr = np.asarray(image)
        rgb = PALETTE[arr] if arr.ndim == 2 else arr
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.size == 0:
        raise ValueError("image must be a nonempty (h, w, 3) array or a code grid")
    return rgb


def ppm_bytes(image) -> bytes:
    """Binary P6 encoding of an image, a code grid or an RGB array."""
    rgb = _as_rgb(image)
    h, w = rgb.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.tobytes()


def write_ppm(image, path) -> None:
    Path(path).write_bytes(ppm_bytes(image))
