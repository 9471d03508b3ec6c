"""Spiral statistics of point sequences around a center.

Angles are unwrapped into a strictly increasing sequence ``theta`` (each
value the smallest one above its predecessor that is congruent to the
principal argument), radii are kept as ``log r``.  On top of that sit
windowed log-linear fits, the relative fit residual ``d_h``, the increment
sequences ``delta`` / ``big_delta`` and their exponential-decay tests,
coarsening sweeps, the log-radial eversion and polygon lengths.

Points can be passed as a plain sequence of complex numbers or as a
:class:`~zvdl.fixpoints.FixedPointSequence`.  For the latter the stored
log offsets ``log(phi - rho)`` are used, which keeps deep trace points
(``|phi - rho|`` far below double resolution around ``rho``) meaningful.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .fixpoints import FixedPointSequence

__all__ = [
    "SpiralError",
    "PolarTrace",
    "LinearModel",
    "DecayReport",
    "unwrap_theta",
    "window_fit",
    "d_h_series",
    "d_h_floor",
    "decay_test",
    "classify_nearly_logarithmic",
    "classify_nearly_uniform",
    "coarsen",
    "coarsening_sweep",
    "SweepResult",
    "eversion_embed",
    "polygon_length",
    "write_statistics_csv",
    "DECAY_SLOPE",
    "DECAY_R2",
]

TWO_PI = 2.0 * math.pi
EPS = np.finfo(float).eps
DECAY_SLOPE = -0.005
DECAY_R2 = 0.9
# entries within this many ulps of their own rounding scale carry no signal
FLOOR_ULPS = 64.0


class SpiralError(ValueError):
    pass


@dataclass(frozen=True)
class PolarTrace:
    """Unwrapped angles and log radii of a point sequence about ``center``."""

    center: complex
    theta: np.ndarray
    log_r: np.ndarray
    delta: np.ndarray
    big_delta: np.ndarray

    def __len__(self):
        return len(self.theta)

    @property
    def delta_floor(self) -> float:
        """Rounding floor of the increments (used to screen ``big_delta``)."""
        return FLOOR_ULPS * EPS * TWO_PI


@dataclass(frozen=True)
class LinearModel:
    m: float
    b: float
    r_squared: float
    window: tuple[int, int]


@dataclass(frozen=True)
class DecayReport:
    """Least-squares fit of ``log series[n]`` against ``n``.

    ``dropped`` counts entries left out: non-positive ones and ones at or
    below the rounding ``floor``.  When nothing above the floor remains the
    series is indistinguishable from zero and counts as decayed, with
    ``note`` saying so and the fit fields set to nan.
    """

    slope: float
    intercept: float
    r_squared: float
    is_exponential_decay: bool
    used: int = 0
    dropped: int = 0
    floor: float = 0.0
    note: str = ""
    thresholds: tuple[float, float] = (DECAY_SLOPE, DECAY_R2)


# --------------------------------------------------------------------------
# polar form


def _polar(points, center) -> tuple[complex, np.ndarray, np.ndarray]:
    """(center, log r, principal arg) for points or a traced sequence."""
    if isinstance(points, FixedPointSequence):
        target = points.target
        if center is None:
            center = target
        center = complex(center)
        if points.has_offsets and target is not None and center == target:
            w = points.log_offsets
            return center, w.real.copy(), np.angle(np.exp(1j * w.imag))
        points = points.phis
    if center is None:
        raise SpiralError("a center is required for plain point lists")
    center = complex(center)
    diff = np.asarray(points, dtype=complex) - center
    if np.any(diff == 0):
        raise SpiralError("a point coincides with the center")
    return center, np.log(np.abs(diff)), np.angle(diff)


def _unwrap(arg: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # increments in (0, 2 pi]: the smallest strictly positive step
    d = np.mod(np.diff(arg), TWO_PI)
    d[d == 0] = TWO_PI
    # theta[n] = arg[n] + 2 pi k[n] exactly, rather than a running sum
    approx = arg[0] + np.concatenate(([0.0], np.cumsum(d)))
    k = np.round((approx - arg) / TWO_PI)
    theta = arg + TWO_PI * k
    bad = np.nonzero(np.diff(theta) <= 0)[0]
    if bad.size:
        # rounding lost a step; repair sequentially from the first casualty
        for i in range(int(bad[0]), theta.size - 1):
            if theta[i + 1] > theta[i]:
                continue
            if d[i] < math.pi:
                # genuine step below the spacing of doubles at theta[i]
                theta[i + 1] = np.nextafter(theta[i], math.inf)
            else:
                while theta[i + 1] <= theta[i]:
                    theta[i + 1] += TWO_PI
    return theta, d


def unwrap_theta(points, center=None) -> PolarTrace:
    """Strictly increasing angles of ``points`` about ``center``.

    ``theta[0]`` is the principal argument, each later value the smallest
    one exceeding its predecessor in the right residue class mod 2 pi.
    For a :class:`FixedPointSequence` the center defaults to its target.
    """
    center, log_r, arg = _polar(points, center)
    if len(arg) < 2:
        raise SpiralError("need at least two points")
    theta, d = _unwrap(arg)
    return PolarTrace(center, theta, log_r, d, np.abs(np.diff(d)))


def _trace(obj, center=None) -> PolarTrace:
    return obj if isinstance(obj, PolarTrace) else unwrap_theta(obj, center)


# --------------------------------------------------------------------------
# fits


def _ols(x: np.ndarray, y: np.ndarray):
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    if sxx == 0:
        raise SpiralError("degenerate fit: all abscissae equal")
    m = float(dx @ dy) / sxx
    b = ym - m * xm
    resid = dy - m * dx
    sst = float(dy @ dy)
    ssr = float(resid @ resid)
    r2 = 1.0 - ssr / sst if sst > 0 else (1.0 if ssr == 0 else 0.0)
    return m, float(b), min(1.0, max(0.0, r2))


def window_fit(trace: PolarTrace, h: int, K: int) -> LinearModel:
    """OLS fit of ``log_r`` against ``theta`` over indices ``h .. h+K``."""
    if K < 2:
        raise SpiralError("K must be at least 2")
    if h < 0 or h + K >= len(trace):
        raise SpiralError(f"window [{h}, {h + K}] out of range for {len(trace)} points")
    sl = slice(h, h + K + 1)
    m, b, r2 = _ols(trace.theta[sl], trace.log_r[sl])
    return LinearModel(m, b, r2, (h, K))


def _window_models(trace: PolarTrace, K: int):
    from numpy.lib.stride_tricks import sliding_window_view

    x = sliding_window_view(trace.theta, K + 1)
    y = sliding_window_view(trace.log_r, K + 1)
    xm = x.mean(axis=1, keepdims=True)
    ym = y.mean(axis=1, keepdims=True)
    dx, dy = x - xm, y - ym
    m = np.einsum("ij,ij->i", dx, dy) / np.einsum("ij,ij->i", dx, dx)
    b = ym[:, 0] - m * xm[:, 0]
    return m, b


def _d_h(trace: PolarTrace, K: int) -> tuple[np.ndarray, np.ndarray]:
    if K < 2:
        raise SpiralError("K must be at least 2")
    if len(trace) < K + 2:
        raise SpiralError(f"need at least K + 2 = {K + 2} points")
    m, b = _window_models(trace, K)
    th = trace.theta[K:]
    lr = trace.log_r[K:]
    pred = m * th + b
    den = np.abs(lr)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.abs(pred - lr) / den
        floor = FLOOR_ULPS * EPS * (np.abs(m * th) + np.abs(b) + den) / den
    d[den == 0] = np.nan
    floor[den == 0] = np.nan
    return d, floor


def d_h_series(trace, K: int = 50, center=None) -> np.ndarray:
    """Relative residual of each window fit at the window's last index.

    ``d_h = |m theta_n + b - log r_n| / |log r_n|`` with ``n = h + K``, for
    ``h = 0 .. len - K - 1``.  Entries whose denominator vanishes are nan.
    """
    return _d_h(_trace(trace, center), K)[0]


def d_h_floor(trace, K: int = 50, center=None) -> np.ndarray:
    """Rounding level of each ``d_h`` entry (same indexing as :func:`d_h_series`)."""
    return _d_h(_trace(trace, center), K)[1]


def decay_test(series, floor=0.0) -> DecayReport:
    """Is ``series`` exponentially decaying in its index?

    Fits ``log series[n]`` against ``n`` over the entries that are positive
    and above ``floor`` (a scalar or per-entry array).  Decay means slope
    below ``DECAY_SLOPE`` with r^2 at least ``DECAY_R2``.  A series that is
    identically zero, or entirely under the floor, counts as decayed.
    """
    s = np.asarray(series, dtype=float)
    if s.size < 10:
        raise SpiralError("series too short (need at least 10 entries)")
    fl = np.broadcast_to(np.asarray(floor, dtype=float), s.shape)
    finite = np.isfinite(s)
    keep = finite & (s > 0) & ~(s <= fl)
    n = np.nonzero(keep)[0]
    dropped = int(s.size - n.size)
    if np.all(s[finite] == 0):
        return DecayReport(math.nan, math.nan, math.nan, True, 0, dropped, float(np.nanmax(fl)),
                           "identically zero")
    if n.size < 3:
        if np.all(s[finite] <= 0):
            raise SpiralError("series has no positive entries")
        if np.all((s[finite] >= 0) & (s[finite] <= fl[finite])):
            return DecayReport(math.nan, math.nan, math.nan, True, int(n.size), dropped,
                               float(np.nanmax(fl)), "below rounding floor")
        raise SpiralError("fewer than 3 usable entries")
    m, b, r2 = _ols(n.astype(float), np.log(s[n]))
    ok = m < DECAY_SLOPE and r2 >= DECAY_R2
    note = f"{dropped} entries dropped" if dropped else ""
    fmax = float(np.nanmax(fl)) if np.any(np.isfinite(fl)) else 0.0
    return DecayReport(m, b, r2, bool(ok), int(n.size), dropped, fmax, note)


def classify_nearly_logarithmic(points, center=None, K: int = 50) -> tuple[bool, DecayReport]:
    """Decay test on ``d_h`` for window length ``K``."""
    d, floor = _d_h(_trace(points, center), K)
    rep = decay_test(d, floor)
    return rep.is_exponential_decay, rep


def classify_nearly_uniform(points, center=None) -> tuple[bool, DecayReport]:
    """Decay test on ``big_delta``."""
    tr = _trace(points, center)
    rep = decay_test(tr.big_delta, tr.delta_floor)
    return rep.is_exponential_decay, rep


# --------------------------------------------------------------------------
# coarsening


def coarsen(points, filter_index: int):
    """Every ``filter_index``-th element starting at index 0.

    Works on lists, arrays and :class:`FixedPointSequence` (a new sequence
    on the coarser progression is returned).
    """
    if int(filter_index) != filter_index or filter_index < 1:
        raise SpiralError("filter index must be a positive integer")
    k = int(filter_index)
    if isinstance(points, FixedPointSequence):
        from .fixpoints import Progression

        sub = points.points[::k]
        if not sub:
            raise SpiralError("coarsening is empty")
        prog = Progression(points.prog.dx * k, len(sub))
        return FixedPointSequence(points.ray, prog, list(sub), points.target, points.converged,
                                  points.model)
    sub = points[::k]
    if len(sub) == 0:
        raise SpiralError("coarsening is empty")
    return sub


@dataclass
class SweepResult:
    models: list[tuple[int, LinearModel]]
    slope_diffs: np.ndarray = field(default_factory=lambda: np.empty(0))
    intercept_diffs: np.ndarray = field(default_factory=lambda: np.empty(0))

    def decreasing_fraction(self) -> float:
        """Share of consecutive difference pairs that decrease (slopes and intercepts pooled)."""
        pairs = [np.diff(self.slope_diffs), np.diff(self.intercept_diffs)]
        total = sum(p.size for p in pairs)
        if total == 0:
            return math.nan
        return sum(int(np.sum(p < 0)) for p in pairs) / total


def coarsening_sweep(points, center=None, filter_indices: Iterable[int] = (512, 256, 128, 64, 32, 16)
                     ) -> SweepResult:
    """Fit ``log r`` vs ``theta`` over each coarsening, re-unwrapping every time.

    The differences are ``|m_{k_{i+1}} - m_{k_i}|`` in the order the filter
    indices are given (likewise for intercepts).
    """
    models = []
    for k in filter_indices:
        tr = unwrap_theta(coarsen(points, k), center)
        if len(tr) < 3:
            raise SpiralError(f"filter index {k} leaves fewer than 3 points")
        models.append((int(k), window_fit(tr, 0, len(tr) - 1)))
    ms = np.array([mod.m for _, mod in models])
    bs = np.array([mod.b for _, mod in models])
    return SweepResult(models, np.abs(np.diff(ms)), np.abs(np.diff(bs)))


# --------------------------------------------------------------------------
# eversion and lengths


def eversion_embed(points, center=None) -> np.ndarray:
    """Map each point to distance ``|log r|`` from the center, same argument.

    Points at ``r = 1`` land on the center (a warning is issued).
    """
    center, log_r, arg = _polar(points, center)
    if np.any(log_r == 0):
        import warnings

        warnings.warn("points at unit distance map onto the center", stacklevel=2)
    return center + np.abs(log_r) * np.exp(1j * arg)


def polygon_length(points) -> float:
    """Sum of distances between consecutive points."""
    p = np.asarray(points, dtype=complex)
    if p.size < 2:
        raise SpiralError("need at least two points")
    return float(np.sum(np.abs(np.diff(p))))


# --------------------------------------------------------------------------
# output


def write_statistics_csv(path, trace: PolarTrace, K: int = 50, xs: Sequence[float] | None = None) -> None:
    """Columns n, theta, log_r, delta, big_delta, d_h (17 significant digits).

    ``delta`` is filled for n < len - 1, ``big_delta`` for n < len - 2 and
    ``d_h`` in the row of the window start ``h`` for h < len - K.
    """
    N = len(trace)
    dh = d_h_series(trace, K) if N >= K + 2 else np.empty(0)

    def fmt(a, i):
        return "" if i >= len(a) or not np.isfinite(a[i]) else f"{a[i]:.17g}"

    with open(path, "w", newline="") as fh:
        fh.write(f"# K={K} window=[h,h+K] center={trace.center.real:.17g},{trace.center.imag:.17g}\n")
        w = csv.writer(fh)
        w.writerow(["n", "theta", "log_r", "delta", "big_delta", "d_h"])
        for i in range(N):
            w.writerow([i, fmt(trace.theta, i), fmt(trace.log_r, i), fmt(trace.delta, i),
                        fmt(trace.big_delta, i), fmt(dh, i)])
