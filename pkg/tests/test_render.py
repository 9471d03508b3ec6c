import hashlib
from pathlib import Path

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from zvdl.cli import function_from_spec
from zvdl.fixpoints import riemann_zero
from zvdl.render import (
    A_PHI,
    COMPLEMENT_A_INFINITY,
    PALETTE,
    BasinParams,
    Code,
    PlotRegion,
    basin_plot,
    ppm_bytes,
    quadrant_code,
    quadrant_codes,
    quadrant_plot,
    spiral_overlay,
    write_ppm,
)
from zvdl.variants import GenericFunction
from zvdl.zeta import zeta_array

GOLDEN = Path(__file__).parent / "golden" / "fig1_quadrant_400.sha256"
RICH = {Code.RICH_BLUE, Code.RICH_RED, Code.RICH_YELLOW, Code.RICH_GREEN}
PALE = {Code.PALE_BLUE, Code.PALE_RED, Code.PALE_YELLOW, Code.PALE_GREEN}
IDENTITY = GenericFunction(lambda s: s, name="id", vfunc=lambda s: np.asarray(s, dtype=complex))


def fig1_plot():
    return quadrant_plot(function_from_spec("fig1"), PlotRegion(0j, 4.0, 4.0, 400, 400))


# -- Table 1 -----------------------------------------------------------------

TRUTH = [
    (1 + 1j, Code.RICH_BLUE),
    (20 + 20j, Code.PALE_BLUE),
    (-1 + 1j, Code.RICH_RED),
    (-20 + 20j, Code.PALE_RED),
    (-1 - 1j, Code.RICH_YELLOW),
    (-20 - 20j, Code.PALE_YELLOW),
    (1 - 1j, Code.RICH_GREEN),
    (20 - 20j, Code.PALE_GREEN),
    (3 + 0j, Code.BLACK),
]


@pytest.mark.parametrize("value, code", TRUTH)
def test_truth_table(value, code):
    assert quadrant_code(value) == code


def test_truth_table_axes_and_nonfinite():
    assert quadrant_code(5j) == Code.BLACK
    assert quadrant_code(complex(np.nan, 1)) == Code.BLACK
    assert quadrant_code(complex(np.inf, 1)) == Code.BLACK
    # a relative band around the axes
    assert quadrant_code(1 + 0.01j, axis_tol=0.02) == Code.BLACK
    assert quadrant_code(1 + 0.01j, axis_tol=0.001) == Code.RICH_BLUE


@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False), st.floats(0.1, 1e3))
def test_code_depends_only_on_value(value, radius):
    assume(abs(abs(value) - radius) > 1e-12 * radius)
    code = quadrant_code(value, radius)
    if value.real == 0 or value.imag == 0:
        assert code == Code.BLACK
        return
    quad = (0 if value.imag > 0 else 3) if value.real > 0 else (1 if value.imag > 0 else 2)
    assert code == 1 + 2 * quad + (abs(value) > radius)


def test_identity_plot_examples():
    region = PlotRegion(0j, 50.0, 50.0, 101, 101)
    img = quadrant_plot(IDENTITY, region)
    i, j = region.nearest_pixel(1 + 1j)
    assert img.codes[j, i] == Code.RICH_BLUE
    i, j = region.nearest_pixel(-20 + 20j)
    assert img.codes[j, i] == Code.PALE_RED


# -- regions -----------------------------------------------------------------


def test_region_mapping():
    r = PlotRegion(1 + 1j, 4.0, 2.0, 4, 2)
    assert r.point(0, 0) == pytest.approx(1 + 1j + complex(-1.5, 0.5))
    assert r.grid()[1, 3] == pytest.approx(r.point(3, 1))
    assert r.pixel_of(r.point(2, 1)) == pytest.approx((2, 1))
    with pytest.raises(ValueError):
        PlotRegion(0j, 0.0, 1.0, 10, 10)
    with pytest.raises(ValueError):
        PlotRegion(0j, 1.0, 1.0, 0, 10)


# -- Figure 1 function -------------------------------------------------------------


def test_fig1_junctions():
    img = fig1_plot()
    assert img.neighborhood(1) >= RICH
    assert img.neighborhood(-1) >= RICH
    assert img.neighborhood(-1j) >= PALE
    assert not img.neighborhood(-1j) & RICH


def test_fig1_golden_and_deterministic():
    a, b = ppm_bytes(fig1_plot()), ppm_bytes(fig1_plot())
    assert a == b
    assert hashlib.sha256(a).hexdigest() == GOLDEN.read_text().split()[0]


def test_pole_pixels_are_pale():
    f = GenericFunction(lambda s: 1 / s, vfunc=lambda s: 1 / np.asarray(s, dtype=complex))
    img = quadrant_plot(f, PlotRegion(0j, 3.0, 3.0, 3, 3))
    assert img.report["poles"] == 1
    assert Code(int(img.codes[1, 1])) in PALE


def test_conjugate_mirror_of_zeta_minus_s():
    f = GenericFunction(lambda s: 0j, vfunc=lambda s: zeta_array(s) - s)
    img = quadrant_plot(f, PlotRegion(complex(0.5, 0), 12.0, 12.0, 120, 120))
    swap = np.array([0, 7, 8, 5, 6, 3, 4, 1, 2], dtype=np.uint8)
    mirrored = swap[img.codes[::-1, :]]
    assert np.mean(mirrored != img.codes) < 1e-3


def test_fixres_plot_has_junctions_near_imaginary_axis():
    img = quadrant_plot(function_from_spec("fixres:1"), PlotRegion(0j, 6.0, 6.0, 300, 300))
    # the fixed point of V_1 near 0.98 + 1.71i is a four-rich junction
    assert img.neighborhood(0.9801494041520757 + 1.7146860678848372j) >= RICH


# -- basins ----------------------------------------------------------------------


def test_basin_point_examples():
    # pixel centers exactly at 0 and at phi
    r0 = PlotRegion(0j, 0.01, 0.01, 1, 1)
    img = basin_plot(BasinParams(A_PHI), r0)
    assert img.marked[0, 0]
    phi = BasinParams().phi
    img = basin_plot(BasinParams(A_PHI), PlotRegion(phi, 0.01, 0.01, 1, 1))
    assert img.marked[0, 0] and img.first_hit[0, 0] == 0


def test_basin_two_is_not_in_a_phi():
    # zeta maps (1, oo) into itself: the orbit of 2 never reaches phi
    img = basin_plot(BasinParams(A_PHI), PlotRegion(2 + 0j, 0.01, 0.01, 1, 1))
    assert not img.marked[0, 0]


def test_basin_modes_nearly_identical():
    region = PlotRegion(-1 + 0j, 6.0, 4.0, 90, 60)
    a = basin_plot(BasinParams(A_PHI), region)
    b = basin_plot(BasinParams(COMPLEMENT_A_INFINITY), region)
    assert np.mean(a.marked == b.marked) > 0.99


def test_basin_monotone_in_max_iter():
    region = PlotRegion(-1 + 0j, 6.0, 4.0, 60, 40)
    few = basin_plot(BasinParams(A_PHI, max_iter=60), region)
    many = basin_plot(BasinParams(A_PHI, max_iter=300), region)
    assert not np.any(few.marked & ~many.marked)


def test_basin_pole_hits_unresolved():
    # the pixel center is the pole itself
    img = basin_plot(BasinParams(A_PHI), PlotRegion(1 + 0j, 0.01, 0.01, 1, 1))
    assert img.unresolved[0, 0] and not img.marked[0, 0]


@pytest.mark.parametrize("kw", [{"max_iter": 10}, {"escape_radius": 50}, {"attract_tol": 0},
                                {"mode": "julia"}])
def test_basin_params_validation(kw):
    with pytest.raises(ValueError):
        BasinParams(**kw)


# -- overlays ------------------------------------------------------------------


def test_overlay_counts_and_colors():
    n = np.arange(8)
    pts = 0.5 ** n * np.exp(1j * n * np.pi / 4)
    img = spiral_overlay(pts, 0, evert=False, px=200)
    assert (img.markers, img.chords) == (8, 7)
    rgb = img.rgb()
    red = np.all(rgb == (255, 0, 0), axis=2)
    blue = np.all(rgb == (0, 0, 255), axis=2)
    assert red.sum() > 0 and blue.sum() > 0
    # every blue pixel lies within one pixel of a chord
    pix = np.array([img.region.pixel_of(p) for p in pts])
    ys, xs = np.nonzero(blue)
    q = xs + 1j * ys
    a, b = pix[:-1, 0] + 1j * pix[:-1, 1], pix[1:, 0] + 1j * pix[1:, 1]
    t = np.clip(((q[:, None] - a) * np.conj(b - a)).real / np.abs(b - a) ** 2, 0, 1)
    dist = np.abs(q[:, None] - (a + t * (b - a))).min(axis=1)
    assert dist.max() <= 1.0


def test_overlay_rho1(rho1_trace):
    img = spiral_overlay(rho1_trace.phis[:60], riemann_zero(1))
    assert img.markers == 60
    assert np.any(np.all(img.rgb() == (255, 0, 0), axis=2))


def test_overlay_too_short():
    with pytest.raises(ValueError):
        spiral_overlay([2j], 0)


# -- PPM -------------------------------------------------------------------------


def test_ppm_examples(tmp_path):
    assert ppm_bytes(np.zeros((1, 1), np.uint8)) == b"P6\n1 1\n255\n\x00\x00\x00"
    two = np.array([[Code.RICH_BLUE, Code.PALE_GREEN]], np.uint8)
    assert ppm_bytes(two) == b"P6\n2 1\n255\n" + bytes([0, 0, 255, 170, 255, 170])
    path = tmp_path / "x.ppm"
    write_ppm(two, path)
    assert path.read_bytes() == ppm_bytes(two)
    with pytest.raises(ValueError):
        ppm_bytes(np.zeros((0, 3, 3), np.uint8))


def test_palette_fixed():
    assert PALETTE.tolist() == [[0, 0, 0], [0, 0, 255], [170, 170, 255], [255, 0, 0], [255, 170, 170],
                                [255, 215, 0], [255, 255, 170], [0, 160, 0], [170, 255, 170]]
