"""The 27-dimension global + local signature descriptor.

Layout (1-based feature names):

  f1       bbox width / height
  f2, f3   ink center of gravity (x, y) / bbox height
  f4       ink pixel count / bbox area
  f5       number of 8-connected ink components
  f6       global baseline row / bbox height
  f7       upper extension (baseline row - bbox top) / bbox height
  f8       lower extension (bbox bottom - baseline row) / bbox height
  f9, f10  high-pressure-region center of gravity (x, y) / bbox height
  f11      high-pressure pixel count / ink pixel count
  f12      cross points / skeleton pixel count
  f13      edge points / skeleton pixel count
  f14      slope angle of the skeleton, radians in (-pi/2, pi/2]
  f15      skeleton pixels on the bbox main diagonal / skeleton pixel count
  f16-f27  per horizontal third, top to bottom: CoG-x / band height,
           CoG-y / band height, band ink / total ink, band baseline row /
           band height

Coordinate conventions: x is the column axis, y the row axis (growing
downward); centers of gravity use pixel centers (index + 0.5) so a
symmetric glyph lands exactly on 0.5 of its extent. Baselines are the
rows with the largest ink projection, ties to the topmost row. Cross and
edge points use the Rutovitz crossing number over the 8-neighborhood
(transitions in the circular neighbor sequence): endpoints have crossing
number 1, branch or crossing pixels have 3 or more; this matches the
usual skeleton-topology reading and keeps a plus-shaped glyph at exactly
one cross point. Any feature whose denominator vanishes is emitted as 0
with a named warning flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import UsageError
from .pnm import BinaryImage
from .preprocess import BBox, EIGHT_CONNECTED, circular_transitions, neighbor_stack

FEATURE_COUNT = 27
BAND_COUNT = 3


@dataclass(frozen=True)
class SignatureFeatures:
    values: np.ndarray           # (27,) float64
    warnings: tuple[str, ...]    # names of zero-guarded features

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)


def _center_of_gravity(mask: np.ndarray) -> tuple[float, float]:
    """(x, y) of the ink mass in pixel-center coordinates."""
    ys, xs = np.nonzero(mask)
    return float(xs.mean()) + 0.5, float(ys.mean()) + 0.5


def _baseline_row(mask: np.ndarray) -> int:
    """Row with the maximum horizontal ink projection; ties to the top row."""
    return int(np.argmax(mask.sum(axis=1)))


def _crossing_numbers(mask: np.ndarray) -> np.ndarray:
    """Rutovitz crossing number of every pixel of the skeleton mask."""
    return circular_transitions(neighbor_stack(mask.astype(np.uint8)))


def _slope_angle(mask: np.ndarray) -> float:
    """Angle of the least-squares line through the skeleton pixel centers.

    A fit with no horizontal spread (vertical strokes, single pixels) is
    reported as pi/2.
    """
    ys, xs = np.nonzero(mask)
    x = xs.astype(np.float64) + 0.5
    y = ys.astype(np.float64) + 0.5
    sxx = float(((x - x.mean()) ** 2).sum())
    if sxx == 0.0:
        return math.pi / 2
    sxy = float(((x - x.mean()) * (y - y.mean())).sum())
    return math.atan(sxy / sxx)


def _diagonal_mask(height: int, width: int) -> np.ndarray:
    """Pixels crossed by the main diagonal of the bbox scaled to a square.

    Pixel (r, c) maps to the half-open cells [r/H, (r+1)/H) x [c/W,
    (c+1)/W) of the unit square; it lies on the diagonal y = x when the
    two intervals overlap. Integer arithmetic keeps the test exact.
    """
    r = np.arange(height)[:, None]
    c = np.arange(width)[None, :]
    return (r * width < (c + 1) * height) & (c * height < (r + 1) * width)


def _band_bounds(height: int) -> list[tuple[int, int]]:
    return [
        (k * height // BAND_COUNT, (k + 1) * height // BAND_COUNT)
        for k in range(BAND_COUNT)
    ]


def extract_features(
    binary: BinaryImage,
    thinned: BinaryImage,
    hpr: BinaryImage,
    bbox: BBox,
) -> SignatureFeatures:
    """Compute the 27-entry descriptor from bbox-cropped preprocessing output."""
    ink = binary.pixels
    h, w = ink.shape
    if (h, w) != (bbox.height, bbox.width):
        raise UsageError("binary image shape does not match the bounding box")
    if thinned.pixels.shape != (h, w) or hpr.pixels.shape != (h, w):
        raise UsageError("thinned/hpr shapes do not match the binary image")
    ink_count = int(ink.sum())
    if ink_count == 0:
        raise UsageError("binary image has no ink; preprocess should have rejected it")

    f = np.zeros(FEATURE_COUNT, dtype=np.float64)
    warn: list[str] = []

    f[0] = w / h
    cogx, cogy = _center_of_gravity(ink)
    f[1] = cogx / h
    f[2] = cogy / h
    f[3] = ink_count / (w * h)
    f[4] = float(ndimage.label(ink, structure=EIGHT_CONNECTED)[1])

    base = _baseline_row(ink)
    f[5] = base / h
    f[6] = base / h                 # upper extension: bbox top is row 0
    f[7] = (h - 1 - base) / h

    hpr_count = int(hpr.pixels.sum())
    if hpr_count > 0:
        hx, hy = _center_of_gravity(hpr.pixels)
        f[8] = hx / h
        f[9] = hy / h
    else:
        warn.append("hpr_cog")
    f[10] = hpr_count / ink_count

    skel = thinned.pixels
    skel_count = int(skel.sum())
    if skel_count > 0:
        cn = _crossing_numbers(skel)
        f[11] = int(((cn >= 3) & skel).sum()) / skel_count
        f[12] = int(((cn == 1) & skel).sum()) / skel_count
        f[13] = _slope_angle(skel)
        f[14] = int((skel & _diagonal_mask(h, w)).sum()) / skel_count
    else:
        warn.extend(["cross_points", "edge_points", "slope", "trace"])

    for k, (lo, hi) in enumerate(_band_bounds(h)):
        band = ink[lo:hi]
        band_h = hi - lo
        base_idx = 15 + 4 * k
        band_ink = int(band.sum()) if band_h > 0 else 0
        if band_ink == 0:
            warn.append(f"band{k + 1}")
            continue
        bx, by = _center_of_gravity(band)
        f[base_idx] = bx / band_h
        f[base_idx + 1] = by / band_h
        f[base_idx + 2] = band_ink / ink_count
        f[base_idx + 3] = _baseline_row(band) / band_h

    return SignatureFeatures(values=f, warnings=tuple(warn))
