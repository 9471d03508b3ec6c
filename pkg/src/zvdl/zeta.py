"""Double-precision Riemann zeta function, its derivative, and log-gamma.

Evaluation uses the Euler-Maclaurin formula for ``Re s >= 0.5`` and the
reflection formula

    zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s) zeta(1 - s)

to the left of that line.  The gamma factors are combined in log space so
that heights up to ``|Im s| ~ 500`` neither overflow nor underflow.

Scalar functions take and return Python ``complex``.  :func:`zeta_array`
is a vectorised twin used by the raster renderer.
"""

from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "ZetaError",
    "PoleError",
    "AccuracyError",
    "EvalParams",
    "DEFAULT_PARAMS",
    "OVERFLOW",
    "is_overflow",
    "bernoulli",
    "zeta",
    "zeta_deriv",
    "zeta_and_deriv",
    "zeta_array",
    "log_gamma",
    "digamma",
    "zeta_iterate",
]


class ZetaError(ArithmeticError):
    """Base class for evaluation failures in this package."""


class PoleError(ZetaError):
    """Raised when a function is evaluated at (or within 1e-12 of) a pole."""


class AccuracyError(ZetaError):
    """Raised when the requested accuracy cannot be met with the given parameters."""


#: Stand-in for values that overflow double precision.  Finite, so
#: comparisons such as ``abs(w) > R`` stay well defined.
OVERFLOW = complex(sys.float_info.max, 0.0)

POLE_GUARD = 1e-12
# Euler-Maclaurin needs ~|Im s| terms; beyond this height it is the wrong tool
MAX_HEIGHT = 1e6
LOG_2PI = math.log(2.0 * math.pi)
LOG_PI = math.log(math.pi)
LOG_2 = math.log(2.0)


def is_overflow(w: complex) -> bool:
    return w == OVERFLOW or not cmath.isfinite(w)


def _bernoulli_table(count: int) -> tuple[float, ...]:
    # B_0 .. B_count via the Akiyama-Tanigawa recurrence, exact rationals
    out = []
    a = [Fraction(0)] * (count + 1)
    for m in range(count + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    # the recurrence yields B_1 = +1/2; the sign is irrelevant here
    return tuple(float(b) for b in out)


_BERNOULLI = _bernoulli_table(60)

# B_{2k} / (2k)! for k = 1..30
_EM_COEFFS = tuple(_BERNOULLI[2 * k] / math.factorial(2 * k) for k in range(1, 31))

# B_{2k} / (2k (2k-1)) for the Stirling series
_STIRLING = tuple(_BERNOULLI[2 * k] / (2 * k * (2 * k - 1)) for k in range(1, 16))

_LOGN = np.log(np.arange(1, 4097, dtype=float))
_LOGN.setflags(write=False)


def bernoulli(n: int) -> float:
    """Bernoulli number B_n for ``0 <= n <= 60`` (with B_1 = +1/2)."""
    return _BERNOULLI[n]


@dataclass(frozen=True)
class EvalParams:
    """Tuning knobs for Euler-Maclaurin evaluation.

    ``em_terms`` is the cutoff N (``None`` picks ``max(20, ceil|Im s| + 10)``
    per call); ``bernoulli_order`` is the largest Bernoulli index used in the
    correction sum.
    """

    em_terms: int | None = None
    bernoulli_order: int = 20
    target_abs_err: float = 1e-12

    def __post_init__(self):
        if self.em_terms is not None and self.em_terms < 10:
            raise ValueError("em_terms must be >= 10")
        if self.bernoulli_order % 2 or not 2 <= self.bernoulli_order <= 30:
            raise ValueError("bernoulli_order must be even and in [2, 30]")
        if not self.target_abs_err >= 1e-14:
            raise ValueError("target_abs_err must be >= 1e-14")

    def cutoff(self, s: complex) -> int:
        if self.em_terms is not None:
            return self.em_terms
        return max(20, math.ceil(abs(s.imag)) + 10)


DEFAULT_PARAMS = EvalParams()


def _check_pole(s: complex) -> None:
    if not cmath.isfinite(s) or abs(s.imag) > MAX_HEIGHT:
        raise ZetaError(f"s = {s!r} is outside the supported range |Im s| <= {MAX_HEIGHT:g}")
    if abs(s - 1.0) < POLE_GUARD:
        raise PoleError(f"zeta has a pole at s = 1 (got {s!r})")


def _logs(count: int) -> np.ndarray:
    if count <= _LOGN.size:
        return _LOGN[:count]
    return np.log(np.arange(1, count + 1, dtype=float))


def _euler_maclaurin(s: complex, n_cut: int, order: int, deriv: bool):
    """Return ``(zeta, zeta', err)``; ``zeta'`` is None unless ``deriv``."""
    logn = _logs(n_cut - 1)
    powers = np.exp(-s * logn)
    total = complex(powers.sum())
    dtotal = complex(-(logn * powers).sum()) if deriv else 0j

    log_n = math.log(n_cut)
    a = cmath.exp(-s * log_n)  # N^{-s}
    head = a * n_cut / (s - 1.0)
    total += head + 0.5 * a
    if deriv:
        dtotal += -log_n * head - head / (s - 1.0) - 0.5 * log_n * a

    # corrections B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
    poch = s
    dpoch = 1.0 + 0j
    scale = a / n_cut
    inv_n2 = 1.0 / (n_cut * n_cut)
    term = 0j
    for k in range(1, order // 2 + 1):
        c = _EM_COEFFS[k - 1]
        term = c * poch * scale
        total += term
        if deriv:
            dtotal += c * (dpoch - log_n * poch) * scale
        u, v = s + (2 * k - 1), s + 2 * k
        dpoch = dpoch * u * v + poch * (u + v)
        poch = poch * u * v
        scale *= inv_n2

    k = order // 2 + 1
    nxt = _EM_COEFFS[k - 1] * poch * scale
    denom = s.real + 2 * k - 1
    err = abs(nxt) * abs(s + 2 * k - 1) / denom if denom > 0 else math.inf
    return total, (dtotal if deriv else None), err


def _log_sin(w: complex) -> complex:
    """log sin(w) on some branch, stable for large |Im w|."""
    if w.imag < 0:
        return _log_sin(w.conjugate()).conjugate()
    q = cmath.exp(2j * w)  # |q| <= 1
    one_minus = 1.0 - q
    if one_minus == 0:
        return complex(-math.inf, 0.0)
    return -1j * w + cmath.log(one_minus) + cmath.log(0.5j)


def _sin_half_pi(s: complex) -> complex:
    """sin(pi s / 2) with the real part reduced so trivial zeros are exact."""
    m = round(s.real / 2.0)
    value = cmath.sin(0.5 * math.pi * complex(s.real - 2.0 * m, s.imag))
    return -value if m % 2 else value


def _cot(w: complex) -> complex:
    if w.imag < 0:
        return _cot(w.conjugate()).conjugate()
    q = cmath.exp(2j * w)
    return 1j * (q + 1.0) / (q - 1.0)


def _log_chi(s: complex) -> complex:
    """log of 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) on some branch."""
    return s * LOG_2 + (s - 1.0) * LOG_PI + _log_sin(0.5 * math.pi * s) + log_gamma(1.0 - s)


def _use_reflection(s: complex) -> bool:
    # near s = 0 the reflected argument sits on the pole; EM is fine there
    return s.real < 0.5 and abs(s) >= 0.5


def _exp_guarded(w: complex) -> complex:
    if w.real > 709.0:
        return OVERFLOW
    if w.real == -math.inf:
        return 0j
    return cmath.exp(w)


def _meet(value: complex, err: float, p: EvalParams, explicit: bool) -> None:
    if err > max(p.target_abs_err, 1e-12 * abs(value)) and explicit:
        raise AccuracyError(
            f"Euler-Maclaurin error estimate {err:.3g} exceeds target; "
            "increase em_terms or bernoulli_order"
        )


def zeta_and_deriv(s, p: EvalParams = DEFAULT_PARAMS, *, reflect: bool | None = None):
    """Return ``(zeta(s), zeta'(s))`` sharing one Euler-Maclaurin pass.

    ``reflect`` forces the code path (True: functional equation, False:
    direct Euler-Maclaurin); by default the path is chosen from ``Re s``.
    """
    s = complex(s)
    _check_pole(s)
    if reflect is None:
        reflect = _use_reflection(s)
    if not reflect:
        z, dz, err = _euler_maclaurin(s, p.cutoff(s), p.bernoulli_order, True)
        _meet(z, err, p, p.em_terms is not None)
        return z, dz
    t = 1.0 - s
    _check_pole(t)
    z1, dz1, err = _euler_maclaurin(t, p.cutoff(t), p.bernoulli_order, True)
    _meet(z1, err, p, p.em_terms is not None)
    log_chi = _log_chi(s)
    chi = _exp_guarded(log_chi)
    if chi == OVERFLOW:
        return OVERFLOW, OVERFLOW
    # d/ds log chi = log 2 + log pi + (pi/2) cot(pi s/2) - digamma(1-s)
    half = 0.5 * math.pi * s
    if chi == 0:
        return 0j, 0j
    if s.imag == 0 and _sin_half_pi(s) == 0:
        # zeros of the sine: chi vanishes, chi' = chi_rest * (pi/2) cos
        rest = _exp_guarded(s * LOG_2 + (s - 1.0) * LOG_PI + log_gamma(t))
        return 0j, rest * 0.5 * math.pi * cmath.cos(half) * z1
    dlog_chi = LOG_2 + LOG_PI + 0.5 * math.pi * _cot(half) - digamma(t)
    return chi * z1, chi * (dlog_chi * z1 - dz1)


def zeta(s, p: EvalParams = DEFAULT_PARAMS, *, reflect: bool | None = None) -> complex:
    """Riemann zeta function at a complex point.

    Raises :class:`PoleError` within ``1e-12`` of ``s = 1`` and
    :class:`AccuracyError` when an explicit ``em_terms`` cannot reach the
    target accuracy.
    """
    s = complex(s)
    _check_pole(s)
    if reflect is None:
        reflect = _use_reflection(s)
    if not reflect:
        z, _, err = _euler_maclaurin(s, p.cutoff(s), p.bernoulli_order, False)
        _meet(z, err, p, p.em_terms is not None)
        return z
    t = 1.0 - s
    _check_pole(t)
    z1, _, err = _euler_maclaurin(t, p.cutoff(t), p.bernoulli_order, False)
    _meet(z1, err, p, p.em_terms is not None)
    half = 0.5 * math.pi * s
    if abs(half.imag) < 200.0:
        # direct sine keeps the exact zeros at negative even integers
        chi = _exp_guarded(s * LOG_2 + (s - 1.0) * LOG_PI + log_gamma(t))
        if chi == OVERFLOW:
            return OVERFLOW
        return chi * _sin_half_pi(s) * z1
    chi = _exp_guarded(_log_chi(s))
    if chi == OVERFLOW:
        return OVERFLOW
    return chi * z1


def zeta_deriv(s, p: EvalParams = DEFAULT_PARAMS, *, reflect: bool | None = None) -> complex:
    """Derivative of zeta from the term-wise differentiated formulas."""
    return zeta_and_deriv(s, p, reflect=reflect)[1]


def log_gamma(s) -> complex:
    """Principal branch of log Gamma(s).

    The argument is shifted right with the recurrence until ``Re >= 15``,
    where the Stirling series is summed; the branch cut lies along the
    negative real axis.
    """
    s = complex(s)
    if s.imag == 0.0 and s.real <= 0.0 and s.real == math.floor(s.real):
        raise PoleError(f"Gamma has a pole at {s.real:g}")
    shift = 0j
    w = s
    while w.real < 15.0:
        shift += cmath.log(w)
        w += 1.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = 0j
    power = inv
    for c in _STIRLING[:10]:
        series += c * power
        power *= inv2
    return (w - 0.5) * cmath.log(w) - w + 0.5 * LOG_2PI + series - shift


def digamma(s) -> complex:
    s = complex(s)
    if s.imag == 0.0 and s.real <= 0.0 and s.real == math.floor(s.real):
        raise PoleError(f"digamma has a pole at {s.real:g}")
    shift = 0j
    w = s
    while w.real < 15.0:
        shift += 1.0 / w
        w += 1.0
    inv2 = 1.0 / (w * w)
    series = 0j
    power = inv2
    for k in range(1, 11):
        series += _BERNOULLI[2 * k] / (2 * k) * power
        power *= inv2
    return cmath.log(w) - 0.5 / w - series - shift


def zeta_iterate(s, n: int, p: EvalParams = DEFAULT_PARAMS, *, escape_radius: float = 1e6) -> complex:
    """n-fold iterate of zeta starting at ``s``.

    Returns :data:`OVERFLOW` once an iterate leaves the disk of radius
    ``escape_radius``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    w = complex(s)
    for _ in range(n):
        if abs(w) > escape_radius:
            return OVERFLOW
        w = zeta(w, p)
        if is_overflow(w):
            return OVERFLOW
    if abs(w) > escape_radius:
        return OVERFLOW
    return w


# --------------------------------------------------------------------------
# vectorised evaluation (rendering)


def _em_array(s: np.ndarray, n_cut: int, order: int) -> np.ndarray:
    logn = _logs(n_cut - 1)
    total = np.zeros(s.shape, dtype=complex)
    for chunk in np.array_split(logn, max(1, logn.size // 256)):
        total += np.exp(-s[..., None] * chunk).sum(axis=-1)
    log_n = math.log(n_cut)
    a = np.exp(-s * log_n)
    total += a * n_cut / (s - 1.0) + 0.5 * a
    poch = s.copy()
    scale = a / n_cut
    inv_n2 = 1.0 / (n_cut * n_cut)
    for k in range(1, order // 2 + 1):
        total += _EM_COEFFS[k - 1] * poch * scale
        poch = poch * (s + (2 * k - 1)) * (s + 2 * k)
        scale = scale * inv_n2
    return total


def _log_gamma_array(s: np.ndarray) -> np.ndarray:
    shift = np.zeros(s.shape, dtype=complex)
    w = s.copy()
    need = w.real < 15.0
    while need.any():
        shift[need] += np.log(w[need])
        w[need] += 1.0
        need = w.real < 15.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros(s.shape, dtype=complex)
    power = inv
    for c in _STIRLING[:10]:
        series += c * power
        power = power * inv2
    return (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + series - shift


def _log_sin_array(w: np.ndarray) -> np.ndarray:
    flip = w.imag < 0
    v = np.where(flip, np.conj(w), w)
    with np.errstate(divide="ignore"):
        out = -1j * v + np.log(1.0 - np.exp(2j * v)) + cmath.log(0.5j)
    return np.where(flip, np.conj(out), out)


def zeta_array(s, p: EvalParams = DEFAULT_PARAMS, *, chunk: int = 4096) -> np.ndarray:
    """Vectorised zeta.  Poles and points beyond ``MAX_HEIGHT`` map to ``nan``; overflow maps to :data:`OVERFLOW`.

    Points are grouped by the Euler-Maclaurin cutoff they need, so a few
    high points do not make the whole array expensive.
    """
    s = np.asarray(s, dtype=complex)
    flat = s.ravel()
    out = np.empty(flat.shape, dtype=complex)
    pole = (np.abs(flat - 1.0) < POLE_GUARD) | ~np.isfinite(flat) | (np.abs(flat.imag) > MAX_HEIGHT)
    reflect = (flat.real < 0.5) & (np.abs(flat) >= 0.5)
    arg = np.where(reflect, 1.0 - flat, flat)
    arg = np.where(pole, 2.0, arg)
    if p.em_terms is not None:
        cuts = np.full(flat.shape, p.em_terms)
    else:
        cuts = np.maximum(20, np.ceil(np.abs(arg.imag)) + 10).astype(np.int64)
        # bucket cutoffs to powers of two above 64 to limit distinct passes
        big = cuts > 64
        cuts[big] = 2 ** np.ceil(np.log2(cuts[big])).astype(np.int64)
    order = np.argsort(cuts, kind="stable")
    base = np.empty(flat.shape, dtype=complex)
    start = 0
    while start < order.size:
        n_cut = int(cuts[order[start]])
        stop = start
        while stop < order.size and cuts[order[stop]] == n_cut and stop - start < chunk:
            stop += 1
        idx = order[start:stop]
        base[idx] = _em_array(arg[idx], n_cut, p.bernoulli_order)
        start = stop

    out[:] = base
    if reflect.any():
        r = flat[reflect]
        half = 0.5 * np.pi * r
        small = np.abs(half.imag) < 200.0
        log_rest = r * LOG_2 + (r - 1.0) * LOG_PI + _log_gamma_array(1.0 - r)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            log_chi = log_rest + np.where(small, 0j, _log_sin_array(half))
            chi = np.exp(np.minimum(log_chi.real, 709.0) + 0j) * np.exp(1j * log_chi.imag)
            chi = np.where(small, chi * np.sin(np.where(small, half, 0)), chi)
            val = chi * base[reflect]
        val = np.where(log_chi.real > 709.0, OVERFLOW, val)
        out[reflect] = val
    out[pole] = np.nan
    return out.reshape(s.shape)
