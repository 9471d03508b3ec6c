"""Verdict reports for traced fixed-point sequences.

Nothing here asserts a conjecture.  Each check computes the relevant
quantities from a trace and returns a report; test suites and the CLI
decide what to do with the verdicts.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .fixpoints import (
    FixedPointSequence,
    FixpointError,
    NewtonConfig,
    Progression,
    TracePoint,
    nearest_fixpoint_to_zero,
    riemann_zero,
    riemann_zeros,
    trace_ray,
)
from .spirals import (
    DecayReport,
    SpiralError,
    classify_nearly_logarithmic,
    classify_nearly_uniform,
    decay_test,
    unwrap_theta,
)
from .variants import ZETA, GenericFunction, RaySpec
from .zeta import ZetaError, zeta

__all__ = [
    "NotConverged",
    "Theorem1Report",
    "ConjectureReport",
    "Question1Report",
    "estimate_limit",
    "check_theorem1",
    "check_corollary",
    "run_conjecture2",
    "check_question1",
    "anomaly_metrics",
    "synthetic_sequence",
    "CONSISTENT",
    "HYPOTHESIS_NOT_MET",
    "INCONSISTENT",
    "RIEMANN_ZERO",
    "THE_POINT_ONE",
    "NEITHER",
]

CONSISTENT = "consistent"
HYPOTHESIS_NOT_MET = "hypothesis-not-met"
INCONSISTENT = "inconsistent"
RIEMANN_ZERO = "riemann-zero"
THE_POINT_ONE = "the-point-one"
NEITHER = "neither"

CAUCHY_RUN = 5
CAUCHY_EPS = 1e-12
ZERO_TOL = 1e-6
ZERO_DISTANCE = 1e-4
LIMIT_GAP_MAX = 1e-6
IDENTITY_SAMPLES = 5


class NotConverged(ValueError):
    pass


def synthetic_sequence(points: Sequence[complex], xs: Sequence[float] | None = None,
                       ray: RaySpec = RaySpec(1), target=None) -> FixedPointSequence:
    """Wrap arbitrary points as a sequence (residuals recorded as nan)."""
    n = len(points)
    if xs is None:
        xs = [float(i) for i in range(n)]
    dx = xs[1] - xs[0] if n > 1 else 1.0
    seq = FixedPointSequence(ray, Progression(dx, n), target=None if target is None else complex(target))
    seq.points = [TracePoint(float(x), complex(p), math.nan) for x, p in zip(xs, points)]
    return seq


def estimate_limit(seq: FixedPointSequence) -> complex:
    """Last point, provided the last five increments are below 1e-12."""
    if len(seq) < CAUCHY_RUN + 1:
        raise NotConverged("sequence too short for the Cauchy gate")
    for n in range(len(seq) - CAUCHY_RUN, len(seq)):
        if not seq.increment(n) < CAUCHY_EPS:
            raise NotConverged(f"increment at n = {n} is {seq.increment(n):.3g}")
    return seq.points[-1].phi


# --------------------------------------------------------------------------
# Theorem 1 and its corollary


@dataclass
class IdentitySample:
    n: int
    x: float
    log_phi: float  # log |phi_n|
    log_rhs: float  # log |g(phi_n)| + x_n D_n
    rel_err: float


@dataclass
class Theorem1Report:
    limit_lambda: complex
    hypothesis_value: float
    d_series: list
    g_at_limit: float
    verdict: str
    tolerance: float
    identity: list = field(default_factory=list)

    @property
    def identity_max_rel_err(self) -> float:
        return max((s.rel_err for s in self.identity), default=math.nan)


def _log_abs_g(seq: FixedPointSequence, k: int, g: GenericFunction) -> float:
    p = seq.points[k]
    if g is ZETA and seq.model is not None and p.log_offset is not None and seq.target is not None \
            and abs(p.phi - seq.target) < 1e-2:
        # near the zero a direct evaluation only sees rounding noise
        return seq.model.log_abs_zeta(p.log_offset)
    val = abs(g(p.phi))
    return math.log(val) if val > 0 else -math.inf


def check_theorem1(seq: FixedPointSequence, g: GenericFunction = ZETA, tol: float = ZERO_TOL) -> Theorem1Report:
    """Hypothesis value, ``D_n`` series, ``|g(lambda)|`` and verdict.

    Also checks ``|phi_n| = |g(phi_n)| exp(x_n D_n)`` in log form at five
    evenly spaced indices, which holds for any exact fixed point.
    """
    if len(seq) < 20:
        raise ValueError("need at least 20 points")
    lam = estimate_limit(seq)
    u = seq.ray.u
    P, Q = u.real, u.imag
    hyp = lam.real * P - lam.imag * Q
    d = [p.phi.real * P - p.phi.imag * Q for p in seq.points]
    try:
        g_lim = abs(g(lam))
    except ZetaError:
        g_lim = math.inf
    if not hyp > 0:
        verdict = HYPOTHESIS_NOT_MET
    elif g_lim <= tol:
        verdict = CONSISTENT
    else:
        verdict = INCONSISTENT
    samples = []
    for k in sorted({int(round(i)) for i in np.linspace(0, len(seq) - 1, IDENTITY_SAMPLES)}):
        p = seq.points[k]
        if p.phi == 0:
            continue
        lhs = math.log(abs(p.phi))
        rhs = _log_abs_g(seq, k, g) + p.x * d[k]
        # |log a - log b| is the relative error of a/b to first order
        samples.append(IdentitySample(k, p.x, lhs, rhs, abs(math.expm1(rhs - lhs))))
    return Theorem1Report(lam, hyp, d, g_lim, verdict, tol, samples)


def _near_riemann_zero(lam: complex) -> bool:
    if abs(lam.imag) < ZERO_DISTANCE and lam.real < 0:
        # trivial zeros
        m = round(lam.real / 2.0)
        return m < 0 and abs(lam - 2.0 * m) <= ZERO_DISTANCE
    h = abs(lam.imag)
    zs = riemann_zeros(200)
    if h > zs[-1].imag + 1.0:
        raise ValueError(f"|Im lambda| = {h:.6g} is beyond the scanned zeros")
    q = complex(lam.real, h)
    return min(abs(q - z) for z in zs) <= ZERO_DISTANCE


def check_corollary(seq: FixedPointSequence, tol: float = ZERO_TOL) -> str:
    """Classify the limit as a Riemann zero, the point 1, or neither.

    A Riemann zero needs ``|zeta(lambda)| <= tol`` and a zero of the scan
    (or a trivial zero) within 1e-4.
    """
    lam = estimate_limit(seq)
    if abs(lam - 1.0) <= 1e-6:
        return THE_POINT_ONE
    if abs(zeta(lam)) <= tol and _near_riemann_zero(lam):
        return RIEMANN_ZERO
    return NEITHER


# --------------------------------------------------------------------------
# Conjecture 2 pipeline


@dataclass
class ConjectureReport:
    zero_index: int
    target_zero: complex
    u: complex
    dx: float
    count: int
    converged: bool = False
    nearly_log_verdicts: dict = field(default_factory=dict)
    nearly_uniform: bool = False
    psi_initial: complex | None = None
    limit: complex | None = None
    limit_gap: float = math.nan
    delta_limit: float = math.nan
    winding_points: int | None = None
    sigma_gap: float = math.nan
    error: str | None = None
    skipped_K: list = field(default_factory=list)
    decay: dict = field(default_factory=dict)
    trace: FixedPointSequence | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        def pair(z):
            return None if z is None else [z.real, z.imag]

        def num(v):
            return None if v is None or (isinstance(v, float) and not math.isfinite(v)) else v

        out = {
            "zero_index": self.zero_index,
            "u": pair(self.u),
            "prog": {"dx": self.dx, "count": self.count},
            "converged": self.converged,
            "limit": pair(self.limit),
            "limit_gap": num(self.limit_gap),
            "nearly_log": {str(k): v for k, v in self.nearly_log_verdicts.items()},
            "nearly_uniform": self.nearly_uniform,
            "delta_limit": num(self.delta_limit),
            "winding_points": self.winding_points,
            "sigma_gap": num(self.sigma_gap),
        }
        if self.psi_initial is not None:
            out["psi"] = pair(self.psi_initial)
        if self.skipped_K:
            out["skipped_K"] = list(self.skipped_K)
        if self.error:
            out["error"] = self.error
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _limit_gap(seq: FixedPointSequence) -> float:
    last = seq.points[-1]
    if last.log_offset is not None:
        return math.exp(last.log_offset.real) if last.log_offset.real > -745 else 0.0
    return abs(last.phi - seq.target)


def run_conjecture2(zero_index: int, ray: RaySpec = RaySpec(1), prog: Progression = Progression(1.0, 301),
                    cfg: NewtonConfig = NewtonConfig(), Ks: Iterable[int] = (25, 50, 100),
                    trace: FixedPointSequence | None = None) -> ConjectureReport:
    """Trace from the fixed point nearest ``rho_{zero_index}`` and classify the spiral.

    Failures end up in ``report.error``; nothing is raised for them.
    ``trace`` may supply an already computed sequence.
    """
    rho = riemann_zero(zero_index)
    rep = ConjectureReport(zero_index, rho, ray.u, prog.dx, prog.count)
    try:
        if trace is None:
            psi = nearest_fixpoint_to_zero(rho, cfg)
            trace = trace_ray(ray, prog, psi, cfg, target=rho)
        rep.trace = trace
        rep.psi_initial = trace.points[0].phi
        rep.converged = bool(trace.converged)
        rep.limit = trace.points[-1].phi
        rep.limit_gap = _limit_gap(trace)
        if rep.converged and not rep.limit_gap < LIMIT_GAP_MAX:
            rep.converged = False
            rep.error = f"increments settled but limit gap is {rep.limit_gap:.3g}"
        for K in Ks:
            if len(trace) < K + 12:
                # fewer than 10 windows: no decay fit possible for this K
                rep.skipped_K.append(int(K))
                continue
            ok, dr = classify_nearly_logarithmic(trace, None, K)
            rep.nearly_log_verdicts[int(K)] = ok
            rep.decay[f"d_h_K{K}"] = asdict(dr)
        rep.nearly_uniform, dr = classify_nearly_uniform(trace)
        rep.decay["big_delta"] = asdict(dr)
        if len(trace) >= 500 and rep.converged:
            rep.delta_limit, rep.winding_points = anomaly_metrics(trace)
        if rep.converged:
            rep.sigma_gap = check_question1(trace).gap_to_half
    except (FixpointError, ZetaError, SpiralError, NotConverged, ValueError) as exc:
        rep.error = f"{type(exc).__name__}: {exc}"
    return rep


# --------------------------------------------------------------------------
# Question 1 and the winding anomaly


@dataclass
class Question1Report:
    sigma_estimate: float
    gap_to_half: float
    decay_of_re_parts: DecayReport | None


def check_question1(seq: FixedPointSequence) -> Question1Report:
    """Real part of the limit and how fast the real parts settle onto it.

    Only reports; the distance to 1/2 is data, not a claim.
    """
    lam = estimate_limit(seq)
    sigma = lam.real
    if seq.has_offsets and seq.target is not None and seq.target == lam:
        w = seq.log_offsets
        series = np.exp(w.real) * np.abs(np.cos(w.imag))
    else:
        series = np.abs(seq.phis.real - sigma)
    try:
        dr = decay_test(series)
    except SpiralError:
        dr = None
    return Question1Report(sigma, abs(sigma - 0.5), dr)


def anomaly_metrics(seq, center=None) -> tuple[float, int]:
    """Mean of the last 10% of ``delta_n`` and the points per full turn."""
    if isinstance(seq, FixedPointSequence):
        if len(seq) < 500:
            raise ValueError("need at least 500 points")
        if not seq.converged:
            estimate_limit(seq)
    tr = unwrap_theta(seq, center)
    d = tr.delta
    if d.size < 10:
        raise ValueError("too few increments")
    tail = d[-max(1, d.size // 10):]
    lim = float(np.mean(tail))
    return lim, int(math.ceil(2.0 * math.pi / lim))
