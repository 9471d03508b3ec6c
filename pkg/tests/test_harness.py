import json
import math

import numpy as np
import pytest

from zvdl.fixpoints import Progression, riemann_zero
from zvdl.harness import (
    CONSISTENT,
    HYPOTHESIS_NOT_MET,
    INCONSISTENT,
    NEITHER,
    RIEMANN_ZERO,
    THE_POINT_ONE,
    NotConverged,
    anomaly_metrics,
    check_corollary,
    check_question1,
    check_theorem1,
    estimate_limit,
    run_conjecture2,
    synthetic_sequence,
)
from zvdl.variants import GenericFunction, RaySpec
from zvdl.zeta import zeta


def settling(limit, n=40, rate=0.5):
    """Points approaching ``limit`` geometrically, flat for the last steps."""
    pts = [limit + 0.3 * rate ** k * (1 + 1j) for k in range(n)]
    pts[-8:] = [limit] * 8
    return synthetic_sequence(pts)


def test_estimate_limit_gate():
    seq = settling(2.0)
    assert estimate_limit(seq) == 2.0
    with pytest.raises(NotConverged):
        estimate_limit(synthetic_sequence([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]))
    with pytest.raises(NotConverged):
        estimate_limit(synthetic_sequence([1.0, 1.0]))


# -- Theorem 1 -------------------------------------------------------------


def test_theorem1_rho1(rho1_trace):
    rep = check_theorem1(rho1_trace)
    assert rep.hypothesis_value == pytest.approx(0.5)
    assert rep.g_at_limit < 1e-6
    assert rep.verdict == CONSISTENT
    assert len(rep.identity) == 5
    assert rep.identity_max_rel_err < 1e-8


def test_theorem1_trivial_zero_with_u1():
    # zeta(-2) = 0 exactly, but Re(-2) < 0 so the hypothesis fails for u = 1
    rep = check_theorem1(settling(-2.0))
    assert rep.g_at_limit == 0.0
    assert rep.hypothesis_value == -2.0
    assert rep.verdict == HYPOTHESIS_NOT_MET


def test_theorem1_hypothesis_holds_at_trivial_zero():
    # u = exp(3 pi i / 4) gives hypothesis value (2 + 0) / sqrt 2 > 0 at -2
    lam = -2.0 + 0j
    seq = settling(lam)
    seq.ray = RaySpec.from_angle(3 * math.pi / 4)
    rep = check_theorem1(seq)
    assert rep.hypothesis_value > 0
    assert rep.g_at_limit < 1e-6
    assert rep.verdict == CONSISTENT


def test_theorem1_soundness_with_synthetic_g():
    g = GenericFunction(lambda s: s - 0.5, lambda s: 1.0)
    rep = check_theorem1(settling(3.0), g=g, tol=1e-6)
    assert rep.g_at_limit == pytest.approx(2.5)
    assert rep.verdict == INCONSISTENT
    rep = check_theorem1(settling(0.5), g=g, tol=1e-6)
    assert rep.verdict == CONSISTENT


def test_theorem1_u1_hypothesis_is_real_part():
    for lam in (0.25 + 3j, 2.0 - 1j):
        assert check_theorem1(settling(lam)).hypothesis_value == lam.real


def test_theorem1_needs_twenty_points():
    with pytest.raises(ValueError):
        check_theorem1(synthetic_sequence([1.0] * 10))


# -- corollary ---------------------------------------------------------------


def test_corollary_examples(rho1_trace):
    assert check_corollary(rho1_trace) == RIEMANN_ZERO
    assert check_corollary(synthetic_sequence([1.0] * 10)) == THE_POINT_ONE
    assert check_corollary(synthetic_sequence([2.0] * 10)) == NEITHER
    assert check_corollary(synthetic_sequence([-4.0] * 10)) == RIEMANN_ZERO
    rho = riemann_zero(5)
    assert check_corollary(synthetic_sequence([rho.conjugate()] * 10)) == RIEMANN_ZERO


def test_corollary_not_converged():
    with pytest.raises(NotConverged):
        check_corollary(synthetic_sequence(list(np.arange(10.0))))


# -- Conjecture 2 --------------------------------------------------------------


def test_conjecture2_rho1(rho1_trace):
    rep = run_conjecture2(1, trace=rho1_trace, Ks=(50,))
    assert rep.error is None
    assert rep.converged and rep.nearly_log_verdicts == {50: True} and rep.nearly_uniform
    assert rep.limit_gap < 1e-6
    d = rep.to_dict()
    for key in ("zero_index", "u", "prog", "converged", "limit", "limit_gap", "nearly_log",
                "nearly_uniform", "delta_limit", "winding_points", "sigma_gap"):
        assert key in d
    assert d["prog"] == {"dx": 1.0, "count": 301}
    assert json.loads(rep.to_json())["nearly_log"] == {"50": True}


def test_conjecture2_rho3_fresh():
    rep = run_conjecture2(3, Ks=(25, 50, 100))
    assert rep.converged and all(rep.nearly_log_verdicts.values()) and rep.nearly_uniform
    assert rep.sigma_gap < 1e-6


def test_conjecture2_errors_are_reported():
    rep = run_conjecture2(1, RaySpec.from_angle(0.5))  # Im rho * Im u > 0 is excluded
    assert rep.error is not None and not rep.converged
    assert "error" in rep.to_dict()


def test_conjecture2_short_trace_skips_large_K():
    rep = run_conjecture2(1, prog=Progression(1.0, 80), Ks=(25, 50, 100))
    assert rep.skipped_K == [100]
    assert set(rep.nearly_log_verdicts) == {25, 50}


# -- Question 1 and anomaly ------------------------------------------------------


def test_question1_rho1(rho1_trace):
    q = check_question1(rho1_trace)
    assert q.sigma_estimate == rho1_trace.points[-1].phi.real
    assert q.gap_to_half < 1e-6


def test_question1_synthetic():
    q = check_question1(settling(0.7 + 3j))
    assert q.sigma_estimate == 0.7
    assert q.gap_to_half == pytest.approx(0.2)


def test_anomaly_synthetic_eighth_turns():
    n = np.arange(600)
    pts = 0.999 ** n * np.exp(1j * n * math.pi / 4)
    lim, wp = anomaly_metrics(pts, 0)
    assert lim == pytest.approx(math.pi / 4)
    assert wp == 8
    assert 2 * math.pi <= wp * lim <= 2 * math.pi + lim


def test_anomaly_rho1_fifth_steps():
    from zvdl.fixpoints import nearest_fixpoint_to_zero, trace_ray

    rho = riemann_zero(1)
    seq = trace_ray(RaySpec(1), Progression(0.2, 600), nearest_fixpoint_to_zero(rho), target=rho)
    lim, wp = anomaly_metrics(seq)
    # per step theta gains 2 pi - 0.2 Im(rho) mod 2 pi
    expected = 2 * math.pi - (0.2 * rho.imag) % (2 * math.pi)
    assert lim == pytest.approx(expected, rel=1e-9)
    assert wp == math.ceil(2 * math.pi / expected)
    assert 2 * math.pi <= wp * lim <= 2 * math.pi + lim


def test_anomaly_needs_500_points(rho1_trace):
    with pytest.raises(ValueError):
        anomaly_metrics(rho1_trace)
