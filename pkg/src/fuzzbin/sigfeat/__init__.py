"""Offline signature image pipeline: decode, preprocess, extract features."""

from .features import FEATURE_COUNT, SignatureFeatures, extract_features
from .pnm import BinaryImage, GrayImage, read_image, write_pbm, write_pgm
from .preprocess import BBox, Preprocessed, preprocess

__all__ = [
    "BBox",
    "BinaryImage",
    "FEATURE_COUNT",
    "GrayImage",
    "Preprocessed",
    "SignatureFeatures",
    "extract_features",
    "preprocess",
    "read_image",
    "write_pbm",
    "write_pgm",
]
