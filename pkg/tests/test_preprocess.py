import numpy as np
import pytest

from fuzzbin.errors import EmptySignatureError, UsageError
from fuzzbin.sigfeat.pnm import BinaryImage, GrayImage
from fuzzbin.sigfeat.preprocess import (
    binarize,
    ink_bbox,
    otsu_threshold,
    preprocess,
    remove_specks,
    thin,
)

from conftest import white_canvas


class TestBinarize:
    def test_two_level_separation(self):
        img = white_canvas(6, 6)
        img[2:4, 2:4] = 0
        ink = binarize(GrayImage(img)).pixels
        assert ink.sum() == 4
        assert ink[2, 2] and not ink[0, 0]

    def test_threshold_splits_intermediate_levels(self):
        img = np.full((4, 4), 200, dtype=np.uint8)
        img[0] = 100
        assert otsu_threshold(img) == 100
        assert binarize(GrayImage(img)).pixels.sum() == 4

    def test_all_black_is_all_ink(self):
        img = np.zeros((3, 3), dtype=np.uint8)
        assert binarize(GrayImage(img)).pixels.all()


class TestSpecks:
    def test_small_components_removed(self):
        img = np.zeros((8, 8), dtype=bool)
        img[0, 0] = True                # 1 px speck
        img[4, 2:7] = True              # 5 px line survives
        out = remove_specks(BinaryImage(img)).pixels
        assert not out[0, 0]
        assert out[4, 2:7].all()

    def test_diagonal_counts_as_connected(self):
        img = np.zeros((6, 6), dtype=bool)
        for i in range(4):
            img[i, i] = True            # 4 px diagonal chain stays
        out = remove_specks(BinaryImage(img)).pixels
        assert out.sum() == 4


class TestBBox:
    def test_tight_box(self):
        img = np.zeros((10, 12), dtype=bool)
        img[3:7, 5:9] = True
        box = ink_bbox(BinaryImage(img))
        assert (box.top, box.left, box.height, box.width) == (3, 5, 4, 4)

    def test_empty_raises(self):
        with pytest.raises(EmptySignatureError):
            ink_bbox(BinaryImage(np.zeros((4, 4), dtype=bool)))


class TestThin:
    def test_one_pixel_line_unchanged(self):
        img = np.zeros((5, 9), dtype=bool)
        img[2, 1:8] = True
        assert np.array_equal(thin(BinaryImage(img)).pixels, img)

    def test_thick_bar_becomes_single_line(self):
        img = np.zeros((7, 15), dtype=bool)
        img[2:5, 1:14] = True
        skel = thin(BinaryImage(img)).pixels
        assert 0 < skel.sum() <= 13
        # every skeleton column is one pixel tall
        cols = skel.sum(axis=0)
        assert cols.max() == 1

    def test_skeleton_is_subset_of_input(self):
        rng = np.random.default_rng(2)
        img = rng.random((20, 20)) > 0.4
        skel = thin(BinaryImage(img)).pixels
        assert not (skel & ~img).any()


class TestPreprocess:
    def test_all_white_rejected(self):
        with pytest.raises(EmptySignatureError):
            preprocess(GrayImage(white_canvas(8, 8)))

    def test_solid_rectangle(self):
        img = white_canvas(12, 16)
        img[3:9, 4:12] = 0
        pre = preprocess(GrayImage(img))
        assert (pre.bbox.top, pre.bbox.left) == (3, 4)
        assert (pre.bbox.height, pre.bbox.width) == (6, 8)
        assert pre.binary.pixels.all()

    def test_hpr_catches_darkest_ink_only(self):
        img = white_canvas(6, 10)
        img[2, 1:9] = 120    # light stroke
        img[3, 1:9] = 10     # heavy stroke
        pre = preprocess(GrayImage(img), hpr_fraction=0.5)
        assert pre.hpr.pixels.sum() == 8
        assert pre.hpr.pixels[1].all()   # bbox row 1 is the dark stroke

    def test_uniform_ink_is_all_high_pressure(self):
        img = white_canvas(6, 6)
        img[2:4, 2:4] = 0
        pre = preprocess(GrayImage(img))
        assert np.array_equal(pre.hpr.pixels, pre.binary.pixels)

    def test_hpr_fraction_validated(self):
        img = white_canvas(6, 6)
        img[2:4, 2:4] = 0
        with pytest.raises(UsageError):
            preprocess(GrayImage(img), hpr_fraction=1.5)

    def test_specks_do_not_affect_bbox(self):
        img = white_canvas(20, 20)
        img[10:14, 10:14] = 0
        img[1, 1] = 0  # isolated dot far away
        pre = preprocess(GrayImage(img))
        assert (pre.bbox.top, pre.bbox.left) == (10, 10)
