"""Per-image scalar features: box-counting dimension, lacunarity, energy."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LACUNARITY_BOX = 32
LACUNARITY_STRIDE = 16


class FeatureError(ValueError):
    """A feature is undefined for this image (e.g. an empty mask)."""


@dataclass(frozen=True)
class FeatureVector:
    fractal_dimension: float
    lacunarity: float
    energy: float


def to_grayscale(image: np.ndarray) -> np.ndarray:
    """ITU-R 601 luma, rounded half up to uint8."""
    rgb = np.asarray(image, dtype=np.float64)
    luma = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)


def otsu_threshold(gray: np.ndarray) -> int | None:
    """Threshold ``t`` maximizing between-class variance of ``<= t`` vs ``> t``.

    Returns ``None`` when the histogram has a single occupied level. Ties go
    to the lowest ``t``.
    """
    hist = np.bincount(np.asarray(gray, dtype=np.uint8).ravel(), minlength=256).astype(np.float64)
    if np.count_nonzero(hist) < 2:
        return None
    levels = np.arange(256, dtype=np.float64)
    total = hist.sum()
    w0 = np.cumsum(hist)
    w1 = total - w0
    m0_sum = np.cumsum(hist * levels)
    grand = m0_sum[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = m0_sum / w0
        mu1 = (grand - m0_sum) / w1
        between = w0 * w1 * (mu0 - mu1) ** 2
    between[~np.isfinite(between)] = -1.0
    return int(np.argmax(between))


def binarize(gray: np.ndarray) -> np.ndarray:
    gray = np.asarray(gray, dtype=np.uint8)
    t = otsu_threshold(gray)
    if t is None:
        return np.zeros(gray.shape, dtype=bool)
    return gray > t


def box_sizes(height: int, width: int) -> list[int]:
    limit = min(height, width) // 4
    sizes, eps = [], 1
    while eps <= limit:
        sizes.append(eps)
        eps *= 2
    return sizes


def box_counts(mask: np.ndarray, sizes) -> list[int]:
    """Occupied cells of an aligned ``eps`` grid.

    Only complete eps x eps cells count; a ragged strip at the right or
    bottom edge narrower than ``eps`` is ignored.
    """
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    counts = []
    for eps in sizes:
        rows, cols = h // eps, w // eps
        cells = mask[:rows * eps, :cols * eps].reshape(rows, eps, cols, eps)
        counts.append(int(cells.any(axis=(1, 3)).sum()))
    return counts


def box_count_dimension(mask: np.ndarray) -> float:
    """Least-squares slope of ln N(eps) against ln(1/eps) for eps = 1, 2, 4, ... <= min(H, W)/4."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2 or min(mask.shape) < 64:
        raise ValueError(f"box counting needs a 2-D mask of at least 64x64, got {mask.shape}")
    if not mask.any():
        raise FeatureError("box counting on an empty mask")
    sizes = box_sizes(*mask.shape)
    counts = box_counts(mask, sizes)
    # on-pixels confined to a ragged edge strip can leave large grids empty
    pairs = [(e, n) for e, n in zip(sizes, counts) if n > 0]
    if len(pairs) < 2:
        raise FeatureError("too few occupied box sizes for a regression")
    x = np.log(1.0 / np.array([e for e, _ in pairs], dtype=np.float64))
    y = np.log(np.array([n for _, n in pairs], dtype=np.float64))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def gliding_box_lacunarity(gray: np.ndarray, box: int = LACUNARITY_BOX,
                           stride: int = LACUNARITY_STRIDE) -> float:
    """Var(M) / Mean(M)^2 of window masses M for a ``box`` window moved by ``stride``."""
    g = np.asarray(gray, dtype=np.float64)
    h, w = g.shape
    if box < 1 or box > min(h, w) or stride < 1:
        raise ValueError(f"need 1 <= box <= {min(h, w)} and stride >= 1")
    integral = np.zeros((h + 1, w + 1))
    integral[1:, 1:] = g.cumsum(0).cumsum(1)
    ys = np.arange(0, h - box + 1, stride)
    xs = np.arange(0, w - box + 1, stride)
    y0, x0 = np.meshgrid(ys, xs, indexing="ij")
    masses = (integral[y0 + box, x0 + box] - integral[y0, x0 + box]
              - integral[y0 + box, x0] + integral[y0, x0])
    mean = masses.mean()
    if mean == 0:
        return 0.0
    return float(max(masses.var(), 0.0) / mean ** 2)


def image_energy(gray: np.ndarray) -> float:
    g = np.asarray(gray, dtype=np.int64)
    return float(np.sum(g * g))


def extract_features(image: np.ndarray) -> FeatureVector:
    """All three features for an RGB8 image; raises FeatureError on an empty mask."""
    gray = to_grayscale(image)
    return FeatureVector(
        fractal_dimension=box_count_dimension(binarize(gray)),
        lacunarity=gliding_box_lacunarity(gray),
        energy=image_energy(gray),
    )


def sierpinski_carpet(level: int) -> np.ndarray:
    """Boolean carpet mask of side ``3**level``; used as a box-counting fixture."""
    size = 3 ** level
    idx = np.arange(size)
    hole = np.zeros((size, size), dtype=bool)
    for k in range(level):
        p = 3 ** k
        hole |= np.logical_and.outer((idx // p) % 3 == 1, (idx // p) % 3 == 1)
    return ~hole


CARPET_DIMENSION = math.log(8) / math.log(3)
