import numpy as np
import pytest

from fuzzbin.errors import DataError
from fuzzbin.sigfeat.pnm import (
    BinaryImage,
    GrayImage,
    decode_image,
    read_image,
    write_pbm,
    write_pgm,
)


def test_p2_ascii_roundtrip():
    text = b"P2\n# a comment\n3 2\n255\n0 10 20\n128 254 255\n"
    img = decode_image(text)
    assert isinstance(img, GrayImage)
    assert img.width == 3 and img.height == 2
    assert img.pixels[1, 2] == 255


def test_p5_binary(tmp_path):
    arr = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    path = tmp_path / "img.pgm"
    write_pgm(path, GrayImage(arr))
    img = read_image(path)
    assert np.array_equal(img.pixels, arr)


def test_p1_ascii_packed_digits():
    img = decode_image(b"P1\n4 2\n1010\n0110\n")
    assert isinstance(img, BinaryImage)
    assert img.pixels.tolist() == [[True, False, True, False], [False, True, True, False]]


def test_p4_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    bits = rng.random((5, 11)) > 0.5
    path = tmp_path / "img.pbm"
    write_pbm(path, BinaryImage(bits))
    img = read_image(path)
    assert np.array_equal(img.pixels, bits)


def test_binary_to_gray_maps_ink_to_black():
    gray = BinaryImage(np.array([[True, False]])).to_gray()
    assert gray.pixels.tolist() == [[0, 255]]


def test_corrupt_magic_names_source():
    with pytest.raises(DataError, match="sig.pgm"):
        decode_image(b"P7\n2 2\n255\n", source="sig.pgm")


def test_truncated_raster():
    with pytest.raises(DataError, match="truncated"):
        decode_image(b"P5\n4 4\n255\nabc")


def test_non_numeric_header():
    with pytest.raises(DataError, match="width"):
        decode_image(b"P2\nxx 2\n255\n0 0\n")


def test_maxval_out_of_range():
    with pytest.raises(DataError, match="maxval"):
        decode_image(b"P2\n1 1\n70000\n0\n")


def test_pixel_above_maxval():
    with pytest.raises(DataError, match="exceeds maxval"):
        decode_image(b"P2\n1 1\n10\n11\n")


def test_comments_between_header_tokens():
    img = decode_image(b"P2 # fmt\n2 # width\n1\n255\n3 4\n")
    assert img.pixels.tolist() == [[3, 4]]
