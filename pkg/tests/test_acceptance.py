"""Acceptance criteria 1-10.

Each criterion is a function returning ``(ok, detail)``; the pytest wrappers
assert on ``ok`` and every outcome is printed as one PASS/FAIL line (also
repeated in the terminal summary).  Run ``python tests/test_acceptance.py``
to get just the ten lines.

Thresholds are exactly those of the criteria; a criterion that the
numerics cannot meet is left failing.
"""

from __future__ import annotations

import functools
import hashlib
import math
import time
from pathlib import Path

import mpmath
import numpy as np
import pytest

from zvdl.cli import function_from_spec
from zvdl.fixpoints import (
    Progression,
    _zeros_through,
    nearest_fixpoint_to_zero,
    newton_fixpoint,
    riemann_zero,
    riemann_zeros,
    trace_ray,
)
from zvdl.harness import (
    CONSISTENT,
    RIEMANN_ZERO,
    anomaly_metrics,
    check_corollary,
    check_question1,
    check_theorem1,
)
from zvdl.render import Code, PlotRegion, ppm_bytes, quadrant_plot
from zvdl.spirals import (
    classify_nearly_logarithmic,
    classify_nearly_uniform,
    coarsen,
    coarsening_sweep,
    eversion_embed,
    polygon_length,
)
from zvdl.variants import RaySpec
from zvdl.zeta import log_gamma, zeta

RESULTS: dict[int, tuple[bool, str]] = {}
GOLDEN = Path(__file__).parent / "golden" / "fig1_quadrant_400.sha256"


def report(n: int, ok: bool, detail: str) -> tuple[bool, str]:
    RESULTS[n] = (ok, detail)
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok, detail


def trace_to(n: int, dx: float, count: int):
    rho = riemann_zero(n)
    return trace_ray(RaySpec(1), Progression(dx, count), nearest_fixpoint_to_zero(rho), target=rho)


@functools.lru_cache(maxsize=None)
def fine_tail():
    """rho_1 over X_1 = (50, 50.001, ..., 100): the full-resolution trace, not a stand-in."""
    return trace_to(1, 0.001, 100001).subsequence(50.0)


# -- criteria --------------------------------------------------------------


def criterion_1():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    with mpmath.workdps(30):
        for _ in range(100):
            s = complex(rng.uniform(-10, 10), rng.uniform(-200, 200))
            ref = complex(mpmath.zeta(mpmath.mpc(s.real, s.imag)))
            worst = max(worst, abs(zeta(s) - ref) / abs(ref))
    dt = time.perf_counter() - t0
    return report(1, worst <= 1e-10 and dt < 60,
                  f"max relative error {worst:.2e} vs mpmath over 100 points, {dt:.1f}s")


def criterion_2():
    worst = 0.0
    for re in np.linspace(0.025, 0.975, 20):
        for im in np.linspace(-50.0, 50.0, 20):
            s = complex(re, im)
            lhs = zeta(s, reflect=False)
            chi = 2 ** s * math.pi ** (s - 1) * np.sin(math.pi * s / 2) * np.exp(log_gamma(1 - s))
            rhs = chi * zeta(1 - s, reflect=False)
            worst = max(worst, abs(lhs - rhs))
            worst = max(worst, abs(lhs - zeta(s, reflect=True)))
    return report(2, worst <= 1e-9, f"max functional-equation residual {worst:.2e} on a 20x20 grid")


def criterion_3():
    t0 = time.perf_counter()
    s = newton_fixpoint(0, -0.3)
    dt = time.perf_counter() - t0
    ok = abs(s - (-0.295905)) <= 1e-5 and dt < 1
    return report(3, ok, f"phi = {s.real:.12f}{s.imag:+.1e}i in {dt * 1e3:.1f} ms")


def _bisect_oracle(lo, hi):
    with mpmath.workdps(30):
        a, b = mpmath.mpf(lo), mpmath.mpf(hi)
        fa = mpmath.siegelz(a)
        for _ in range(60):
            m = (a + b) / 2
            fm = mpmath.siegelz(m)
            if fm * fa > 0:
                a, fa = m, fm
            else:
                b = m
        return float((a + b) / 2)


def criterion_4():
    _zeros_through.cache_clear()
    t0 = time.perf_counter()
    zs = riemann_zeros(100)
    dt = time.perf_counter() - t0
    worst = max(abs(zeta(z)) for z in zs)
    inc = all(a.imag < b.imag for a, b in zip(zs, zs[1:]))
    e1 = abs(zs[0].imag - _bisect_oracle(14.0, 14.3))
    e2 = abs(zs[1].imag - _bisect_oracle(20.9, 21.1))
    ok = worst <= 1e-9 and inc and e1 <= 1e-8 and e2 <= 1e-8 and dt < 120
    return report(4, ok, f"max |zeta(rho_n)| {worst:.1e}, increasing={inc}, "
                          f"rho1/rho2 oracle gaps {e1:.1e}/{e2:.1e}, {dt:.1f}s")


def criterion_5():
    t0 = time.perf_counter()
    seq = trace_to(1, 1.0, 301)
    gap = abs(seq.points[-1].phi - riemann_zero(1))
    ok_log, dlog = classify_nearly_logarithmic(seq, None, 50)
    ok_uni, duni = classify_nearly_uniform(seq)
    dt = time.perf_counter() - t0
    ok = seq.converged and gap < 1e-6 and ok_log and ok_uni and dt < 300
    return report(5, ok, f"converged={seq.converged} gap={gap:.1e}; d_h slope {dlog.slope:.4f} "
                          f"r2 {dlog.r_squared:.3f}; Delta slope {duni.slope:.4f} r2 {duni.r_squared:.3f}; "
                          f"{dt:.1f}s")


def criterion_6():
    t0 = time.perf_counter()
    seq = trace_to(70, 1.0, 1501)
    lim, wp = anomaly_metrics(seq)
    dt = time.perf_counter() - t0
    ok = abs(lim / (0.0016 * math.pi) - 1) <= 0.2 and abs(wp / 1187 - 1) <= 0.2 and dt < 1200
    return report(6, ok, f"delta limit {lim / math.pi:.7f} pi, winding points {wp}, {dt:.1f}s")


def criterion_7():
    tail = fine_tail()
    readings = {
        "512..16": list(range(512, 15, -1)),
        "powers of 2": [512, 256, 128, 64, 32, 16],
        "512,128,64,16": [512, 128, 64, 16],
    }
    fr = {k: coarsening_sweep(tail, None, v).decreasing_fraction() for k, v in readings.items()}
    ok = fr["512..16"] >= 0.8
    alt = ", ".join(f"{k}: {v:.1%}" for k, v in fr.items())
    return report(7, ok, f"{len(tail)} points; decreasing share of successive differences ({alt})")


def criterion_8():
    tail = fine_tail()
    ks = [int(math.floor(2 ** n)) for n in range(13, -1, -1)]
    lengths = np.array([polygon_length(eversion_embed(coarsen(tail, k))) for k in ks])
    diffs = np.abs(np.diff(lengths))
    shrink = np.diff(diffs) < 0
    frac = float(np.mean(shrink))
    return report(8, frac >= 0.8, f"successive length differences shrink in {shrink.sum()}/{shrink.size} "
                                  f"steps ({frac:.1%}); filter indices 8192..1")


def criterion_9():
    t0 = time.perf_counter()
    f = function_from_spec("fig1")
    region = PlotRegion(0j, 4.0, 4.0, 400, 400)
    a, b = quadrant_plot(f, region), quadrant_plot(f, region)
    same = ppm_bytes(a) == ppm_bytes(b)
    golden = hashlib.sha256(ppm_bytes(a)).hexdigest() == GOLDEN.read_text().split()[0]
    rich = {Code.RICH_BLUE, Code.RICH_RED, Code.RICH_YELLOW, Code.RICH_GREEN}
    pale = {Code.PALE_BLUE, Code.PALE_RED, Code.PALE_YELLOW, Code.PALE_GREEN}
    junctions = rich <= a.neighborhood(1) and rich <= a.neighborhood(-1) and pale <= a.neighborhood(-1j)
    dt = time.perf_counter() - t0
    ok = same and golden and junctions and dt < 30
    return report(9, ok, f"byte-identical={same} golden={golden} junctions={junctions}, {dt:.2f}s")


def criterion_10():
    worst_id = 0.0
    worst_gap = 0.0
    bad = []
    for n in range(1, 21):
        seq = trace_to(n, 1.0, 301)
        t = check_theorem1(seq)
        c = check_corollary(seq)
        q = check_question1(seq)
        worst_id = max(worst_id, t.identity_max_rel_err)
        worst_gap = max(worst_gap, q.gap_to_half)
        if t.verdict != CONSISTENT or c != RIEMANN_ZERO:
            bad.append(n)
    ok = not bad and worst_id <= 1e-8 and worst_gap < 1e-5
    return report(10, ok, f"rho_1..rho_20: failing verdicts {bad or 'none'}, "
                          f"identity error {worst_id:.1e}, max sigma gap {worst_gap:.1e}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(crit):
    ok, detail = crit()
    assert ok, detail


if __name__ == "__main__":
    for crit in CRITERIA:
        crit()
