import hashlib
import math

import numpy as np
import pytest

from fraqtal.colormaps import grayscale_colormap
from fraqtal.render import RenderSpec, SmoothField, colorize, escape_time_point, render_field

# sha1 of the float64 field bytes for RenderSpec(64, 64, -0.70+0.27j) with defaults
GOLDEN_64 = "bc36ed17143a01710a2998f6f07d9a10a69a2dab"


def test_escape_at_first_sample():
    assert escape_time_point(16, 0) == pytest.approx(0.0, abs=1e-15)


def test_escape_after_one_step():
    expected = 2 - math.log2(math.log(9) / math.log(4))
    assert escape_time_point(3, 0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(1.3356, abs=1e-4)


def test_contracting_orbit_is_interior():
    assert escape_time_point(0.5, 0, max_iter=100) is None


def test_higher_power_escape():
    # z0 = 3, d = 3: z1 = 27 > 4 after one step
    expected = 2 - math.log(math.log(27) / math.log(4)) / math.log(3)
    assert escape_time_point(3, 0, d=3) == pytest.approx(expected, rel=1e-14)


def test_unit_disk_for_zero_constant():
    spec = RenderSpec(256, 256, 0j, viewport=(-2, 2, -2, 2))
    field = render_field(spec).values
    step = 4 / 256
    centers = -2 + (np.arange(256) + 0.5) * step
    zr, zi = np.meshgrid(centers, centers[::-1])
    radius = np.hypot(zr, zi)
    disk = radius <= 1
    interior = field == 1.0
    assert np.mean(interior == disk) >= 0.99
    # all disagreements sit within one pixel diagonal of the circle
    assert np.all(np.abs(radius[interior != disk] - 1) <= step * math.sqrt(2))


@pytest.mark.parametrize("norm", ["linear", "log"])
@pytest.mark.parametrize("c,power", [(-0.7 + 0.27j, 2), (0.285 + 0.01j, 3), (-0.8 + 0.156j, 4)])
def test_values_in_unit_interval(norm, c, power):
    v = render_field(RenderSpec(48, 40, c, power, normalization=norm)).values
    assert v.shape == (40, 48)
    assert np.all((v >= 0) & (v <= 1))


def test_point_symmetry_of_even_power():
    # z -> z^2 + c is invariant under z -> -z; the symmetric viewport maps pixel (x, y) to (W-1-x, H-1-y)
    v = render_field(RenderSpec(128, 128, -0.7 + 0.27j)).values
    np.testing.assert_allclose(v, v[::-1, ::-1], atol=1e-12)


def test_pixel_mapping_matches_point_evaluation():
    spec = RenderSpec(32, 24, -0.7 + 0.27j, viewport=(-1.0, 2.0, -0.5, 1.0))
    v = render_field(spec).values
    for px, py in [(0, 0), (31, 0), (5, 23), (17, 11)]:
        z0 = complex(-1.0 + (px + 0.5) * 3.0 / 32, 1.0 - (py + 0.5) * 1.5 / 24)
        nu = escape_time_point(z0, spec.c)
        assert v[py, px] == (1.0 if nu is None else min(nu / 300, 1.0))


def test_interior_shrinks_as_iterations_grow():
    base = RenderSpec(64, 64, -0.7 + 0.27j, max_iter=50)
    coarse = render_field(base).values == 1.0
    fine = render_field(RenderSpec(64, 64, base.c, max_iter=400)).values == 1.0
    assert np.all(coarse | ~fine)


def test_golden_checksum():
    v = render_field(RenderSpec(64, 64, -0.70 + 0.27j)).values
    assert hashlib.sha1(v.tobytes()).hexdigest() == GOLDEN_64


@pytest.mark.parametrize("workers", [2, 3, 8, 100])
def test_output_independent_of_workers(workers):
    spec = RenderSpec(64, 64, -0.70 + 0.27j)
    v = render_field(spec, workers=workers).values
    assert hashlib.sha1(v.tobytes()).hexdigest() == GOLDEN_64


def test_log_normalization():
    spec = RenderSpec(32, 32, -0.7 + 0.27j, normalization="log")
    lin = render_field(RenderSpec(32, 32, -0.7 + 0.27j)).values
    log = render_field(spec).values
    esc = lin < 1.0
    nu = lin[esc] * 300
    np.testing.assert_allclose(log[esc], np.log1p(nu) / np.log1p(300), atol=1e-12)
    assert np.all(log[~esc] == 1.0)


@pytest.mark.parametrize("kwargs", [
    dict(width=8, height=64), dict(escape_radius=1.0), dict(viewport=(1, -1, -1, 1)),
    dict(max_iter=5), dict(power=1), dict(normalization="sqrt"), dict(c=complex("nan")),
])
def test_spec_validation(kwargs):
    base = dict(width=64, height=64, c=0j)
    base.update(kwargs)
    with pytest.raises(ValueError):
        RenderSpec(**base)


def test_colorize_examples():
    gray = grayscale_colormap()
    field = SmoothField(3, 1, np.array([[0.0, 1.0, 0.5]]))
    rgb = colorize(field, gray)
    assert rgb.dtype == np.uint8 and rgb.shape == (1, 3, 3)
    assert rgb[0].tolist() == [[0, 0, 0], [255, 255, 255], [128, 128, 128]]
