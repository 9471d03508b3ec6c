"""The exponential zeta variants V_z(s) = zeta(s) exp(z s) and their generic form.

``V^g_z(s) = g(s) exp(z s)`` for any callable ``g``; with ``g = zeta`` this
is ``V_z`` itself.  Fixed points of ``V_z`` are zeros of ``V_z(s) - s``.

Besides the literal residual this module exposes the *scaled* residual
``zeta(s) - s exp(-z s)``, which has the same zeros but stays finite where
``exp(z s)`` overflows.  The fixed-point solvers work with the scaled form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .zeta import DEFAULT_PARAMS, OVERFLOW, EvalParams, is_overflow, zeta, zeta_and_deriv, zeta_array

__all__ = [
    "RaySpec",
    "GenericFunction",
    "ZETA",
    "finite_difference",
    "v",
    "v_deriv",
    "v_g",
    "fix_residual",
    "fix_residual_function",
    "scaled_residual",
    "scaled_residual_and_deriv",
]

EXP_LIMIT = 700.0


@dataclass(frozen=True)
class RaySpec:
    """Direction ``u`` (unit modulus, not -1) of a ray ``{x u : x >= 0}``."""

    u: complex = 1.0 + 0j

    def __post_init__(self):
        u = complex(self.u)
        object.__setattr__(self, "u", u)
        if abs(abs(u) - 1.0) > 1e-12:
            raise ValueError(f"ray direction must have unit modulus, got |u| = {abs(u)!r}")
        if abs(u + 1.0) <= 1e-12:
            raise ValueError("u = -1 is excluded")

    @classmethod
    def from_angle(cls, angle: float) -> "RaySpec":
        return cls(cmath.exp(1j * angle))

    def point(self, x: float) -> complex:
        return x * self.u


def finite_difference(f: Callable[[complex], complex], h: float = 1e-6) -> Callable[[complex], complex]:
    """Central-difference derivative of a holomorphic ``f``."""

    def df(s: complex) -> complex:
        s = complex(s)
        return (f(s + h) - f(s - h)) / (2.0 * h)

    return df


@dataclass(frozen=True)
class GenericFunction:
    """An evaluation handle ``g`` plus its derivative.

    ``g`` must be continuous wherever it is queried and safe to call from
    several threads; both are the caller's responsibility.  Without an
    explicit ``deriv`` a central finite difference is used.  ``vfunc``, if
    given, evaluates a whole numpy array at once (used by the renderer).
    """

    func: Callable[[complex], complex]
    deriv: Callable[[complex], complex] | None = None
    name: str = "g"
    vfunc: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, s: complex) -> complex:
        return self.func(s)

    def derivative(self, s: complex) -> complex:
        if self.deriv is None:
            return finite_difference(self.func)(s)
        return self.deriv(s)

    def evaluate_array(self, s) -> np.ndarray:
        """Values on an array; points that fail evaluate to nan."""
        s = np.asarray(s, dtype=complex)
        if self.vfunc is not None:
            return np.asarray(self.vfunc(s), dtype=complex)
        out = np.empty(s.shape, dtype=complex)
        flat, dst = s.ravel(), out.ravel()
        for k, w in enumerate(flat):
            try:
                dst[k] = self.func(complex(w))
            except (ArithmeticError, ValueError):
                dst[k] = complex(math.nan, math.nan)
        return out


def _zeta_deriv(s: complex) -> complex:
    return zeta_and_deriv(s)[1]


ZETA = GenericFunction(zeta, _zeta_deriv, name="zeta", vfunc=zeta_array)


def _exp(w: complex) -> complex:
    if w.real > EXP_LIMIT:
        return OVERFLOW
    return cmath.exp(w)


def v(z, s, p: EvalParams = DEFAULT_PARAMS) -> complex:
    """V_z(s) = zeta(s) exp(z s); :data:`OVERFLOW` when ``Re(z s) > 700``."""
    z, s = complex(z), complex(s)
    zs = z * s
    if zs.real > EXP_LIMIT:
        return OVERFLOW
    val = zeta(s, p)
    if is_overflow(val):
        return OVERFLOW
    return val * cmath.exp(zs)


def v_deriv(z, s, p: EvalParams = DEFAULT_PARAMS) -> complex:
    """d/ds V_z(s) = exp(z s) (zeta'(s) + z zeta(s))."""
    z, s = complex(z), complex(s)
    zs = z * s
    if zs.real > EXP_LIMIT:
        return OVERFLOW
    val, dval = zeta_and_deriv(s, p)
    if is_overflow(val) or is_overflow(dval):
        return OVERFLOW
    return cmath.exp(zs) * (dval + z * val)


def v_g(g: Callable[[complex], complex], z, s) -> complex:
    """V^g_z(s) = g(s) exp(z s)."""
    z, s = complex(z), complex(s)
    zs = z * s
    if zs.real > EXP_LIMIT:
        return OVERFLOW
    val = g(s)
    if is_overflow(val):
        return OVERFLOW
    return val * cmath.exp(zs)


def fix_residual(z, s, p: EvalParams = DEFAULT_PARAMS) -> complex:
    """V_z(s) - s, which vanishes exactly on the fixed-point set of V_z."""
    val = v(z, s, p)
    if val == OVERFLOW:
        return OVERFLOW
    return val - complex(s)


def fix_residual_function(z) -> GenericFunction:
    """``s -> V_z(s) - s`` as a :class:`GenericFunction` with an array form."""
    z = complex(z)

    def vf(s):
        s = np.asarray(s, dtype=complex)
        zs = z * s
        zv = zeta_array(s)
        with np.errstate(over="ignore", invalid="ignore"):
            val = zv * np.exp(np.minimum(zs.real, EXP_LIMIT) + 1j * zs.imag) - s
            # past the exp limit keep the direction, clamp the size
            huge = 1e300 * np.exp(1j * (np.angle(zv) + zs.imag))
        return np.where(zs.real > EXP_LIMIT, huge, val)

    return GenericFunction(lambda s: fix_residual(z, s), name=f"V_{z}(s) - s", vfunc=vf)


def scaled_residual(z, s, g: Callable[[complex], complex] = zeta) -> complex:
    """g(s) - s exp(-z s): same zeros as ``V^g_z(s) - s`` without the overflow."""
    z, s = complex(z), complex(s)
    w = -z * s
    if w.real > EXP_LIMIT:
        return OVERFLOW
    return g(s) - s * cmath.exp(w)


def scaled_residual_and_deriv(z, s, g: GenericFunction = ZETA):
    """Scaled residual and its s-derivative ``g'(s) - exp(-z s)(1 - z s)``."""
    z, s = complex(z), complex(s)
    w = -z * s
    if w.real > EXP_LIMIT:
        return OVERFLOW, OVERFLOW
    e = cmath.exp(w)
    if g is ZETA:
        val, dval = zeta_and_deriv(s)
    else:
        val, dval = g(s), g.derivative(s)
    return val - s * e, dval - e * (1.0 - z * s)
