"""Signature image preprocessing chain.

Order of operations: global Otsu threshold on the gray histogram, removal
of tiny 8-connected specks, tight ink bounding box, two-subiteration
thinning of the cropped mask, and extraction of the darkest ink pixels as
the high-pressure region. All downstream features are computed on the
bounding-box crops, which makes them exactly translation invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import EmptySignatureError, UsageError
from .pnm import BinaryImage, GrayImage

EIGHT_CONNECTED = np.ones((3, 3), dtype=int)
MIN_COMPONENT_AREA = 4  # specks below this are scanner dust, not ink
DEFAULT_HPR_FRACTION = 0.75


@dataclass(frozen=True)
class BBox:
    top: int
    left: int
    height: int
    width: int


@dataclass(frozen=True)
class Preprocessed:
    binary: BinaryImage   # denoised ink mask, cropped to bbox
    thinned: BinaryImage  # one-pixel-wide skeleton of binary
    hpr: BinaryImage      # darkest-ink subset of binary
    bbox: BBox


def otsu_threshold(gray: np.ndarray) -> int:
    """Histogram threshold maximizing between-class variance.

    Returns T such that pixels with value <= T are foreground (ink).
    Ties resolve to the lowest T, so single-level images threshold at
    their level only when that level is 0.
    """
    hist = np.bincount(gray.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    omega = np.cumsum(hist) / total                  # class-0 probability at T
    mu = np.cumsum(hist * np.arange(256)) / total    # cumulative first moment
    mu_total = mu[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma_b = (mu_total * omega - mu) ** 2 / (omega * (1.0 - omega))
    sigma_b = np.nan_to_num(sigma_b[:-1], nan=0.0, posinf=0.0)
    return int(np.argmax(sigma_b))


def binarize(gray: GrayImage) -> BinaryImage:
    t = otsu_threshold(gray.pixels)
    return BinaryImage(gray.pixels <= t)


def remove_specks(binary: BinaryImage, min_area: int = MIN_COMPONENT_AREA) -> BinaryImage:
    """Drop 8-connected ink components smaller than ``min_area`` pixels."""
    labels, count = ndimage.label(binary.pixels, structure=EIGHT_CONNECTED)
    if count == 0:
        return binary
    sizes = np.bincount(labels.ravel())
    keep = sizes >= min_area
    keep[0] = False
    return BinaryImage(keep[labels])


def ink_bbox(binary: BinaryImage) -> BBox:
    rows = np.flatnonzero(binary.pixels.any(axis=1))
    cols = np.flatnonzero(binary.pixels.any(axis=0))
    if rows.size == 0:
        raise EmptySignatureError("no ink pixels remain after noise removal")
    top, bottom = int(rows[0]), int(rows[-1])
    left, right = int(cols[0]), int(cols[-1])
    return BBox(top=top, left=left, height=bottom - top + 1, width=right - left + 1)


def neighbor_stack(img: np.ndarray) -> np.ndarray:
    """8-neighborhoods of every pixel in clockwise order starting north.

    Returns an (8, H, W) uint8 stack computed on a zero-padded copy.
    """
    p = np.pad(img.astype(np.uint8), 1)
    n = p[0:-2, 1:-1]
    ne = p[0:-2, 2:]
    e = p[1:-1, 2:]
    se = p[2:, 2:]
    s = p[2:, 1:-1]
    sw = p[2:, 0:-2]
    w = p[1:-1, 0:-2]
    nw = p[0:-2, 0:-2]
    return np.stack([n, ne, e, se, s, sw, w, nw])


def circular_transitions(stack: np.ndarray) -> np.ndarray:
    """Zero-to-one transitions around the circular neighbor sequence."""
    nxt = np.roll(stack, -1, axis=0)
    return ((stack == 0) & (nxt == 1)).sum(axis=0)


def thin(binary: BinaryImage) -> BinaryImage:
    """Two-subiteration thinning to an 8-connected one-pixel skeleton.

    Each pass marks deletable contour pixels in two direction-biased
    subiterations and removes them in parallel; a pass with no deletions
    terminates the loop. Already-skeletal strokes pass through unchanged.
    """
    img = binary.pixels.astype(np.uint8)
    while True:
        changed = False
        for step in (0, 1):
            stack = neighbor_stack(img)
            b = stack.sum(axis=0)
            a = circular_transitions(stack)
            n_, e_, s_, w_ = stack[0], stack[2], stack[4], stack[6]
            if step == 0:
                cond = (n_ * e_ * s_ == 0) & (e_ * s_ * w_ == 0)
            else:
                cond = (n_ * e_ * w_ == 0) & (n_ * s_ * w_ == 0)
            deletable = (img == 1) & (b >= 2) & (b <= 6) & (a == 1) & cond
            if deletable.any():
                img[deletable] = 0
                changed = True
        if not changed:
            return BinaryImage(img.astype(bool))


def high_pressure_region(
    gray_bbox: np.ndarray, binary: BinaryImage, hpr_fraction: float
) -> BinaryImage:
    """Ink pixels whose intensity is within ``hpr_fraction`` of the darkest ink.

    Threshold is I_min + hpr_fraction * (I_max - I_min) over ink pixels;
    darker means more pen pressure.
    """
    ink = binary.pixels
    values = gray_bbox[ink]
    lo = float(values.min())
    hi = float(values.max())
    cut = lo + hpr_fraction * (hi - lo)
    return BinaryImage(ink & (gray_bbox <= cut))


def preprocess(img: GrayImage, hpr_fraction: float = DEFAULT_HPR_FRACTION) -> Preprocessed:
    """Run the full chain on one grayscale scan.

    Raises EmptySignatureError when nothing but specks (or nothing at all)
    survives binarization.
    """
    if not (0.0 < hpr_fraction < 1.0):
        raise UsageError(f"hpr_fraction must lie in (0, 1), got {hpr_fraction}")
    binary_full = remove_specks(binarize(img))
    bbox = ink_bbox(binary_full)
    rows = slice(bbox.top, bbox.top + bbox.height)
    cols = slice(bbox.left, bbox.left + bbox.width)
    binary = BinaryImage(binary_full.pixels[rows, cols])
    gray_bbox = img.pixels[rows, cols]
    return Preprocessed(
        binary=binary,
        thinned=thin(binary),
        hpr=high_pressure_region(gray_bbox, binary, hpr_fraction),
        bbox=bbox,
    )
