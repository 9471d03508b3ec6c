"""Fixed points of V_z: Newton solves, regional enumeration, Riemann zeros, ray traces.

A trace follows fixed points of ``V_{x u}`` for ``x`` running over an
arithmetic progression ``0, dx, 2 dx, ...``.  Close to a Riemann zero the
fixed point sits at distance ``~ |rho| exp(-x Re(u rho)) / |zeta'(rho)|``,
far below what a double can resolve around ``rho`` once ``x`` is a few
dozen.  From that point on the trace switches to :class:`LocalZeroModel`,
which solves for ``log(phi - rho)`` directly using the Taylor expansion
of zeta about the zero, so statistics of ``|phi - rho|`` and
``arg(phi - rho)`` stay accurate for arbitrarily large ``x``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .variants import ZETA, GenericFunction, RaySpec, scaled_residual_and_deriv
from .zeta import OVERFLOW, ZetaError, log_gamma, zeta, zeta_and_deriv, zeta_array

__all__ = [
    "FixpointError",
    "NoConvergence",
    "DerivativeSingular",
    "TraceBroken",
    "ResidualDegraded",
    "NewtonConfig",
    "Progression",
    "TracePoint",
    "FixedPointSequence",
    "LocalZeroModel",
    "newton_fixpoint",
    "relative_residual",
    "zeta_fixpoints_in_region",
    "hardy_z",
    "riemann_zero",
    "riemann_zeros",
    "nearest_fixpoint_to_zero",
    "trace_ray",
]

TWO_PI = 2.0 * math.pi


class FixpointError(ZetaError):
    pass


class NoConvergence(FixpointError):
    pass


class DerivativeSingular(FixpointError):
    pass


class TraceBroken(FixpointError):
    """Continuation failed even after step halving.  ``partial`` holds the points so far."""

    def __init__(self, message: str, partial: "FixedPointSequence | None" = None):
        super().__init__(message)
        self.partial = partial


class ResidualDegraded(FixpointError):
    pass


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-12
    max_iter: int = 60
    step_halving_limit: int = 10

    def __post_init__(self):
        if not self.tol >= 1e-13:
            raise ValueError("tol must be >= 1e-13")
        if self.max_iter < 1 or self.step_halving_limit < 1:
            raise ValueError("max_iter and step_halving_limit must be positive")


@dataclass(frozen=True)
class Progression:
    """The arithmetic progression ``x_n = n dx``, ``n = 0 .. count-1``."""

    dx: float
    count: int
    x0: float = 0.0

    def __post_init__(self):
        if self.x0 != 0.0:
            raise ValueError("progressions start at x0 = 0")
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if self.count < 1:
            raise ValueError("count must be positive")

    def __len__(self):
        return self.count

    def x(self, n: int) -> float:
        return n * self.dx

    def values(self) -> np.ndarray:
        return np.arange(self.count) * self.dx


class TracePoint(NamedTuple):
    x: float
    phi: complex
    residual: float
    # log(phi - target) when a target zero is known, else None
    log_offset: complex | None = None


@dataclass
class FixedPointSequence:
    ray: RaySpec
    prog: Progression
    points: list[TracePoint] = field(default_factory=list)
    target: complex | None = None
    converged: bool = False
    model: "LocalZeroModel | None" = None

    def __len__(self):
        return len(self.points)

    @property
    def xs(self) -> np.ndarray:
        return np.array([p.x for p in self.points])

    @property
    def phis(self) -> np.ndarray:
        return np.array([p.phi for p in self.points], dtype=complex)

    @property
    def residuals(self) -> np.ndarray:
        return np.array([p.residual for p in self.points])

    @property
    def has_offsets(self) -> bool:
        return bool(self.points) and all(p.log_offset is not None for p in self.points)

    @property
    def log_offsets(self) -> np.ndarray:
        if not self.has_offsets:
            raise ValueError("trace has no target offsets")
        return np.array([p.log_offset for p in self.points], dtype=complex)

    @property
    def limit(self) -> complex:
        return self.points[-1].phi

    def increment(self, n: int) -> float:
        """|phi_n - phi_{n-1}|, from the offsets when both are known."""
        a, b = self.points[n - 1], self.points[n]
        if a.log_offset is not None and b.log_offset is not None:
            return abs(_exp(b.log_offset) - _exp(a.log_offset))
        return abs(b.phi - a.phi)

    def subsequence(self, start_x: float) -> "FixedPointSequence":
        """Tail with ``x >= start_x`` (the progression metadata is kept)."""
        tail = [p for p in self.points if p.x >= start_x - 1e-12]
        return FixedPointSequence(self.ray, self.prog, tail, self.target, self.converged, self.model)


def _exp(w: complex) -> complex:
    if w.real < -745.0:
        return 0j
    return cmath.exp(w)


def _reduce(w: complex) -> complex:
    return complex(w.real, math.remainder(w.imag, TWO_PI))


# --------------------------------------------------------------------------
# Newton


def relative_residual(z, s, r: complex) -> float:
    """``|r| / max(1, |s|)`` for a scaled residual ``r = g(s) - s exp(-z s)``.

    This is ``|V_z(s) - s| |exp(-z s)| / max(1, |s|)``.  The literal
    ``|V_z(s) - s|`` is useless as a stopping test near a zero: its
    sensitivity to ``s`` is ``|exp(z s) zeta'(s)|``, so even the correctly
    rounded fixed point misses any fixed tolerance once ``x`` is a few dozen.
    """
    return abs(r) / max(1.0, abs(complex(s)))


def newton_fixpoint(z, seed, cfg: NewtonConfig = NewtonConfig(), g: GenericFunction = ZETA) -> complex:
    """Solve ``V^g_z(s) = s`` by Newton's method from ``seed``.

    Iterates on the scaled residual ``g(s) - s exp(-z s)``, whose zeros are
    the fixed points, and stops once :func:`relative_residual` is within
    ``cfg.tol``.  A seed that already meets the tolerance is returned unchanged.
    """
    z, s = complex(z), complex(seed)
    for _ in range(cfg.max_iter + 1):
        try:
            r, dr = scaled_residual_and_deriv(z, s, g)
        except (ZetaError, OverflowError) as exc:
            raise NoConvergence(f"evaluation failed at {s!r}: {exc}") from exc
        if r == OVERFLOW or not cmath.isfinite(r) or not cmath.isfinite(dr):
            raise NoConvergence(f"residual overflowed at {s!r}")
        if relative_residual(z, s, r) <= cfg.tol:
            return s
        if abs(dr) < 1e-14:
            raise DerivativeSingular(f"|F'(s)| < 1e-14 at {s!r}")
        s = s - r / dr
    raise NoConvergence(f"no convergence in {cfg.max_iter} iterations from {complex(seed)!r}")


def _residual(z: complex, s: complex, g: GenericFunction = ZETA) -> float:
    return relative_residual(z, s, scaled_residual_and_deriv(z, s, g)[0])


def zeta_fixpoints_in_region(center, width: float, height: float, grid_step: float,
                             cfg: NewtonConfig = NewtonConfig()) -> list[complex]:
    """Fixed points of zeta found by Newton from every seed of a grid over a box.

    Only roots inside the box are kept; duplicates closer than ``10 tol``
    are merged.  Seeds that fail are skipped.
    """
    center = complex(center)
    nx = max(1, int(round(width / grid_step)) + 1)
    ny = max(1, int(round(height / grid_step)) + 1)
    found: list[complex] = []
    for re in np.linspace(center.real - width / 2, center.real + width / 2, nx):
        for im in np.linspace(center.imag - height / 2, center.imag + height / 2, ny):
            seed = complex(re, im)
            if abs(seed - 1.0) < 1e-6:
                continue
            try:
                s = newton_fixpoint(0j, seed, cfg)
            except FixpointError:
                continue
            if abs(s.real - center.real) > width / 2 or abs(s.imag - center.imag) > height / 2:
                continue
            if all(abs(s - f) > 10 * cfg.tol for f in found):
                found.append(s)
    found.sort(key=lambda w: (w.imag, w.real))
    return found


# --------------------------------------------------------------------------
# Riemann zeros on the critical line

ZERO_SCAN_STEP = 0.05
MAX_ZERO_INDEX = 200
LOG_PI = math.log(math.pi)


def _theta(t: float) -> float:
    # Riemann-Siegel theta; only exp(i theta) is used, so the branch is irrelevant
    return log_gamma(complex(0.25, 0.5 * t)).imag - 0.5 * t * LOG_PI


def hardy_z(t: float) -> float:
    """Real-valued rotation of zeta(1/2 + it); its sign changes are the zeros."""
    return (cmath.exp(1j * _theta(t)) * zeta(complex(0.5, t))).real


def _bisect(lo: float, hi: float, zlo: float) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= 1e-14 * max(1.0, hi):
            break
        zm = hardy_z(mid)
        if zm == 0.0:
            return mid
        if (zm > 0) == (zlo > 0):
            lo, zlo = mid, zm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def _zeros_through(count: int) -> tuple[float, ...]:
    heights: list[float] = []
    t0 = 10.0
    block = 20.0
    while len(heights) < count:
        ts = t0 + ZERO_SCAN_STEP * np.arange(int(round(block / ZERO_SCAN_STEP)) + 1)
        theta = np.array([_theta(t) for t in ts])
        zs = (np.exp(1j * theta) * zeta_array(0.5 + 1j * ts)).real
        for i in range(ts.size - 1):
            if zs[i] == 0.0:
                heights.append(float(ts[i]))
            elif zs[i] * zs[i + 1] < 0:
                heights.append(_bisect(float(ts[i]), float(ts[i + 1]), hardy_z(float(ts[i]))))
        t0 = float(ts[-1])
    return tuple(heights[:count])


def riemann_zeros(count: int) -> list[complex]:
    """The first ``count`` nontrivial zeros in the upper half plane, by height."""
    if not 1 <= count <= MAX_ZERO_INDEX:
        raise ValueError(f"zero index must be in 1..{MAX_ZERO_INDEX}")
    return [complex(0.5, t) for t in _zeros_through(count)]


def riemann_zero(n: int) -> complex:
    """rho_n, the n-th nontrivial zero by height (1-based, ``n <= 200``).

    Located by a sign-change scan of the Hardy Z function on the critical
    line with step 0.05, refined by bisection to double resolution.
    """
    if not 1 <= n <= MAX_ZERO_INDEX:
        raise ValueError(f"zero index must be in 1..{MAX_ZERO_INDEX}")
    return riemann_zeros(n)[n - 1]


def nearest_fixpoint_to_zero(rho, cfg: NewtonConfig = NewtonConfig(), half_width: float = 6.0,
                             grid_step: float = 0.5) -> complex:
    """psi_rho: the zeta fixed point closest to ``rho`` within a square box.

    Ties within 1e-3 are broken by smaller imaginary part and reported with
    a :class:`UserWarning`.
    """
    rho = complex(rho)
    cands = zeta_fixpoints_in_region(rho, 2 * half_width, 2 * half_width, grid_step, cfg)
    if not cands:
        raise FixpointError(f"no zeta fixed point within {half_width} of {rho!r}")
    cands.sort(key=lambda w: (abs(w - rho), w.imag))
    if len(cands) > 1 and abs(abs(cands[1] - rho) - abs(cands[0] - rho)) < 1e-3:
        warnings.warn(f"nearest fixed point to {rho!r} is not unique within 1e-3", UserWarning)
    return cands[0]


# --------------------------------------------------------------------------
# local model near a zero


class LocalZeroModel:
    """Taylor model ``zeta(rho + e) = e P(e)`` about a simple zero ``rho``.

    ``P(e) = c_1 + c_2 e + ...`` with ``c_k = zeta^(k)(rho) / k!``; ``c_1``
    comes from the analytic derivative and the rest from a Cauchy integral
    sampled on a circle of radius ``radius``.
    """

    def __init__(self, rho, order: int = 10, radius: float = 0.25, samples: int = 64):
        self.rho = complex(rho)
        self.order = order
        nodes = self.rho + radius * np.exp(2j * np.pi * np.arange(samples) / samples)
        vals = zeta_array(nodes)
        coeffs = np.fft.fft(vals) / samples / radius ** np.arange(samples)
        c = coeffs[1 : order + 1].copy()
        c[0] = zeta_and_deriv(self.rho)[1]
        if abs(c[0]) < 1e-12:
            raise FixpointError(f"{rho!r} is not a simple zero")
        self.coeffs = tuple(complex(v) for v in c)
        self.log_c1 = cmath.log(self.coeffs[0])

    def p(self, e: complex) -> tuple[complex, complex]:
        """P(e) and P'(e) by Horner's rule."""
        val = 0j
        dval = 0j
        for c in reversed(self.coeffs):
            dval = dval * e + val
            val = val * e + c
        return val, dval

    def zeta(self, e: complex) -> complex:
        return e * self.p(e)[0]

    def log_abs_zeta(self, log_e: complex) -> float:
        return log_e.real + math.log(abs(self.p(_exp(log_e))[0]))

    def z_rho(self, z: complex) -> complex:
        """``z * rho`` with the imaginary part reduced mod 2 pi without rounding loss."""
        z = complex(z)
        return complex(z.real * self.rho.real - z.imag * self.rho.imag,
                       _phase(z.real, self.rho.imag, z.imag, self.rho.real))

    def leading(self, z: complex) -> complex:
        """Leading-order log offset ``log rho - log c_1 - z rho`` (reduced)."""
        return _reduce(cmath.log(self.rho) - self.log_c1 - self.z_rho(z))

    def solve(self, z, seed: complex | None = None, tol: float = 4e-15, max_iter: int = 50):
        """Log offset ``w = log(phi - rho)`` of the fixed point of V_z near ``rho``.

        Solves ``w + log P(e^w) + z (rho + e^w) - log(rho + e^w) = 0 (mod 2 pi i)``
        by Newton's method.  Returns ``(w, relative_residual)``.
        """
        z = complex(z)
        zr = self.z_rho(z)
        w = self.leading(z) if seed is None else complex(seed)
        h = 0j
        for _ in range(max_iter):
            e = _exp(w)
            pv, dpv = self.p(e)
            h = _reduce(w + cmath.log(pv) + zr + z * e - cmath.log(self.rho + e))
            dh = 1.0 + e * dpv / pv + z * e - e / (self.rho + e)
            step = h / dh
            w = w - step
            if abs(step) <= tol * max(1.0, abs(w)):
                break
        else:
            raise NoConvergence(f"local model did not converge at z = {z!r}")
        w = _reduce(w)
        e = _exp(w)
        pv = self.p(e)[0]
        # zeta(phi) = phi exp(-z phi) exp(h), so the scaled residual is |zeta(phi)| |1 - exp(-h)|
        phi = self.rho + e
        res = abs(e * pv) * abs(_expm1(-h)) / max(1.0, abs(phi))
        return w, res


def _expm1(h: complex) -> complex:
    # exp(h) - 1 without cancellation for small h
    em = math.expm1(h.real)
    return complex(em * math.cos(h.imag) - 2.0 * math.sin(0.5 * h.imag) ** 2, (em + 1.0) * math.sin(h.imag))


def _split(a: float) -> tuple[float, float]:
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


_TWO_PI_HI = 6.283185307179586
_TWO_PI_LO = 2.4492935982947064e-16


def _phase(a: float, b: float, c: float, d: float) -> float:
    """``a b + c d`` reduced into ``[-pi, pi]``, evaluated in double-double."""
    p1, e1 = _two_prod(a, b)
    p2, e2 = _two_prod(c, d)
    hi, e3 = _two_sum(p1, p2)
    lo = e1 + e2 + e3
    k = round(hi / _TWO_PI_HI)
    q, qe = _two_prod(float(k), _TWO_PI_HI)
    return ((hi - q) - qe) - k * _TWO_PI_LO + lo


# --------------------------------------------------------------------------
# ray traces

CAPTURE_RADIUS = 1e-2
DEEP_RADIUS = 1e-3


def _check_ray_target(ray: RaySpec, target: complex | None) -> None:
    if target is not None and ray.u.imag != 0.0 and target.imag * ray.u.imag >= 0:
        raise ValueError("rays with Im u != 0 require Im(rho) * Im(u) < 0")


def _continue(z_prev: complex, z_next: complex, seed: complex, cfg: NewtonConfig) -> complex:
    """Newton at ``z_next`` from ``seed``, halving the z-step on failure."""
    try:
        return newton_fixpoint(z_next, seed, cfg)
    except FixpointError:
        pass
    pieces = 2
    for _ in range(cfg.step_halving_limit):
        s = seed
        try:
            for k in range(1, pieces + 1):
                s = newton_fixpoint(z_prev + (z_next - z_prev) * k / pieces, s, cfg)
            return s
        except FixpointError:
            pieces *= 2
    raise NoConvergence("continuation failed after step halving")


def trace_ray(ray: RaySpec, prog: Progression, start, cfg: NewtonConfig = NewtonConfig(),
              target=None, *, capture_radius: float = CAPTURE_RADIUS,
              deep_radius: float = DEEP_RADIUS, strict: bool = True) -> FixedPointSequence:
    """Fixed points of ``V_{x_n u}`` for the progression ``x_n``, starting at ``start``.

    Each point is Newton-solved from the previous accepted point (with the
    z-step halved on failure).  When a ``target`` zero is declared and the
    trace has not yet come within ``capture_radius`` of it, Newton is also
    seeded from the target and the root nearer the target is kept.  Inside
    ``deep_radius`` the trace switches to :class:`LocalZeroModel`.
    """
    start = complex(start)
    target = None if target is None else complex(target)
    _check_ray_target(ray, target)
    if _residual(0j, start) > cfg.tol:
        raise ValueError(f"start {start!r} is not a zeta fixed point to tol {cfg.tol}")

    seq = FixedPointSequence(ray, prog, target=target)
    model: LocalZeroModel | None = None

    def offset(phi: complex) -> complex | None:
        if target is None or phi == target:
            return None
        return cmath.log(phi - target)

    seq.points.append(TracePoint(0.0, start, _residual(0j, start), offset(start)))
    phi = start
    w = None
    for n in range(1, prog.count):
        x = prog.x(n)
        z = ray.point(x)
        if model is not None:
            w, res = model.solve(z, None)
            phi = target + _exp(w)
            seq.points.append(TracePoint(x, phi, res, w))
            continue
        z_prev = ray.point(prog.x(n - 1))
        cands = []
        try:
            cands.append(_continue(z_prev, z, phi, cfg))
        except FixpointError:
            pass
        if target is not None and (not cands or abs(cands[0] - target) > capture_radius):
            try:
                cands.append(newton_fixpoint(z, target, cfg))
            except FixpointError:
                pass
        if not cands:
            raise TraceBroken(f"trace broken at x = {x!r}", partial=seq)
        if target is not None:
            cands.sort(key=lambda c: abs(c - target))
        phi = cands[0]
        if target is not None and abs(phi - target) < deep_radius:
            model = seq.model = LocalZeroModel(target)
            w, res = model.solve(z, cmath.log(phi - target))
            phi = target + _exp(w)
            seq.points.append(TracePoint(x, phi, res, w))
            continue
        seq.points.append(TracePoint(x, phi, _residual(z, phi), offset(phi)))

    bad = [p for p in seq.points if p.residual > cfg.tol]
    if bad and strict:
        raise ResidualDegraded(f"{len(bad)} recorded residuals exceed tol {cfg.tol}")
    seq.converged = _cauchy(seq)
    return seq


def _cauchy(seq: FixedPointSequence, run: int = 5, eps: float = 1e-12) -> bool:
    if len(seq) < run + 1:
        return False
    return all(seq.increment(n) < eps for n in range(len(seq) - run, len(seq)))
