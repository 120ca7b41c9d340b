import numpy as np
import pytest

from fraqtal.colormaps import NAMES, get_colormap, grayscale_colormap
from fraqtal.params import PALETTE


@pytest.mark.parametrize("name", NAMES)
def test_tables_are_complete(name):
    cmap = get_colormap(name)
    assert cmap.lut.shape == (256, 3) and cmap.lut.dtype == np.uint8
    assert not cmap.lut.flags.writeable


def test_palette_is_covered():
    assert set(PALETTE) <= set(NAMES)


@pytest.mark.parametrize("name,first,last", [
    ("viridis", (68, 1, 84), (253, 231, 37)),
    ("magma", (0, 0, 4), (252, 253, 191)),
    ("plasma", (13, 8, 135), (240, 249, 33)),
    ("rainbow", (255, 0, 0), (255, 0, 255)),
])
def test_endpoints(name, first, last):
    lut = get_colormap(name).lut
    assert tuple(lut[0]) == first and tuple(lut[-1]) == last


def test_turbo_runs_dark_through_blue_green_to_red():
    lut = get_colormap("turbo").lut.astype(int)
    assert lut[0].sum() < 100 and lut[-1].sum() < 300
    assert lut[40, 2] > lut[40, 0]
    assert lut[-1, 0] > lut[-1, 2]
    assert lut[128, 1] > 200  # green-ish midpoint


def test_gray_ramp():
    assert grayscale_colormap().lut[128].tolist() == [128, 128, 128]


def test_unknown_name():
    with pytest.raises(ValueError, match="unknown colormap"):
        get_colormap("jet")
