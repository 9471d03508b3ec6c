import numpy as np
import pytest

from zvdl.fixpoints import Progression, nearest_fixpoint_to_zero, riemann_zero, trace_ray
from zvdl.variants import RaySpec


def _trace(n, dx, count):
    rho = riemann_zero(n)
    psi = nearest_fixpoint_to_zero(rho)
    return trace_ray(RaySpec(1), Progression(dx, count), psi, target=rho)


@pytest.fixture(scope="session")
def rho1_trace():
    """rho_1, u = 1, X = (0, 1, ..., 300)."""
    return _trace(1, 1.0, 301)


@pytest.fixture(scope="session")
def rho3_trace():
    return _trace(3, 1.0, 301)


@pytest.fixture(scope="session")
def rho1_fine_tail():
    """Fine rho_1 trace, dx = 0.001 up to x = 100, cut at x = 50."""
    return _trace(1, 0.001, 100001).subsequence(50.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
