import math

import numpy as np
import pytest

from fuzzbin.sigfeat.features import extract_features
from fuzzbin.sigfeat.pnm import GrayImage
from fuzzbin.sigfeat.preprocess import preprocess

from conftest import white_canvas


def features_of(img: np.ndarray, hpr_fraction: float = 0.75):
    pre = preprocess(GrayImage(img), hpr_fraction=hpr_fraction)
    return extract_features(pre.binary, pre.thinned, pre.hpr, pre.bbox), pre


def solid_square(canvas=(30, 30), origin=(10, 10), side=10):
    img = white_canvas(*canvas)
    img[origin[0]:origin[0] + side, origin[1]:origin[1] + side] = 0
    return img


def horizontal_line(canvas=(9, 40), row=4, col0=10, length=20):
    img = white_canvas(*canvas)
    img[row, col0:col0 + length] = 0
    return img


def plus_sign(canvas=(20, 20), center=(9, 9), arm=4):
    img = white_canvas(*canvas)
    r, c = center
    img[r, c - arm:c + arm + 1] = 0
    img[r - arm:r + arm + 1, c] = 0
    return img


class TestSolidSquare:
    def test_hand_derived_values(self):
        f, _ = features_of(solid_square())
        v = f.values
        assert v[0] == 1.0          # width / height
        assert v[1] == 0.5          # CoG x sits at the middle of the box
        assert v[2] == 0.5
        assert v[3] == 1.0          # fully inked box
        assert v[4] == 1.0          # one component
        assert f.warnings == ()

    def test_uniform_projection_baseline_is_top_row(self):
        f, _ = features_of(solid_square())
        assert f.values[5] == 0.0
        assert f.values[6] == 0.0
        assert f.values[7] == 0.9   # (10 - 1 - 0) / 10

    def test_band_ink_thirds(self):
        f, _ = features_of(solid_square(side=9))
        # 9 rows split into three 3-row bands of equal ink
        ratios = [f.values[17], f.values[21], f.values[25]]
        assert ratios == pytest.approx([1 / 3] * 3, abs=1e-12)


class TestHorizontalLine:
    def test_hand_derived_values(self):
        f, pre = features_of(horizontal_line())
        v = f.values
        assert v[0] == 20.0                      # 20 wide, 1 tall
        assert v[4] == 1.0                       # one component
        assert pre.thinned.pixels.sum() == 20    # already skeletal
        assert v[11] == 0.0                      # no cross points
        assert v[12] == pytest.approx(2 / 20)    # two endpoints
        assert v[13] == 0.0                      # flat slope
        assert f.warnings == ("band1", "band2")  # 1-row bbox: two empty bands

    def test_vertical_line_slope_is_half_pi(self):
        img = white_canvas(40, 9)
        img[10:30, 4] = 0
        f, _ = features_of(img)
        assert f.values[13] == math.pi / 2

    def test_diagonal_slope_is_quarter_pi(self):
        img = white_canvas(30, 30)
        for i in range(12):
            img[8 + i, 8 + i] = 0
        f, _ = features_of(img)
        assert f.values[13] == pytest.approx(math.pi / 4, abs=1e-12)
        # the skeleton lies exactly on the bbox diagonal
        assert f.values[14] == 1.0


class TestPlusSign:
    def test_one_cross_four_edges(self):
        f, pre = features_of(plus_sign())
        skel_count = int(pre.thinned.pixels.sum())
        v = f.values
        assert v[11] * skel_count == pytest.approx(1.0, abs=1e-9)
        assert v[12] * skel_count == pytest.approx(4.0, abs=1e-9)

    def test_input_already_skeletal(self):
        _, pre = features_of(plus_sign())
        assert np.array_equal(pre.thinned.pixels, pre.binary.pixels)


class TestInvariances:
    @pytest.mark.parametrize("glyph", [solid_square, horizontal_line, plus_sign])
    def test_translation_leaves_features_unchanged(self, glyph):
        base, _ = features_of(glyph())
        img = glyph()
        ys, xs = np.nonzero(img == 0)
        h = ys.max() - ys.min() + 1
        w = xs.max() - xs.min() + 1
        moved = white_canvas(img.shape[0] + 31, img.shape[1] + 17)
        moved[25:25 + h, 13:13 + w] = img[ys.min():ys.max() + 1, xs.min():xs.max() + 1]
        shifted, _ = features_of(moved)
        assert np.abs(shifted.values - base.values).max() <= 1e-12

    def test_integer_upscaling_keeps_aspect_and_components(self):
        base, _ = features_of(solid_square(side=6))
        img = solid_square(side=6)
        big = white_canvas(90, 90)
        scaled = np.kron(img[10:16, 10:16] == 0, np.ones((3, 3), dtype=bool))
        big[20:38, 20:38][scaled] = 0
        up, _ = features_of(big)
        assert up.values[0] == base.values[0]   # aspect ratio f1
        assert up.values[4] == base.values[4]   # component count f5

    def test_bounded_features_stay_in_unit_interval(self):
        rng = np.random.default_rng(44)
        for trial in range(6):
            img = white_canvas(40, 40)
            # random blotches with enough mass to survive despeckling
            for _ in range(4):
                r, c = rng.integers(4, 30, size=2)
                img[r:r + 5, c:c + 5] = rng.integers(0, 90)
            f, _ = features_of(img)
            v = f.values
            bounded = [3, 5, 6, 7, 10, 11, 12, 14]
            for idx in bounded:
                assert 0.0 <= v[idx] <= 1.0, (trial, idx, v[idx])

    def test_band_ink_ratios_sum_to_one(self):
        rng = np.random.default_rng(7)
        for trial in range(5):
            img = white_canvas(36, 36)
            for _ in range(3):
                r, c = rng.integers(2, 28, size=2)
                img[r:r + 6, c:c + 6] = 0
            f, _ = features_of(img)
            if any(w.startswith("band") for w in f.warnings):
                continue
            total = f.values[17] + f.values[21] + f.values[25]
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_empty_band_features_are_zero_with_flag(self):
        f, _ = features_of(horizontal_line())
        assert f.values[15:23].tolist() == [0.0] * 8
        assert "band1" in f.warnings and "band2" in f.warnings
