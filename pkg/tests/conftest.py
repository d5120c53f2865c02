import numpy as np
import pytest

from fuzzbin.core import LabeledDataset


def make_dataset(vectors, identities=None, roles=None) -> LabeledDataset:
    vectors = np.asarray(vectors, dtype=np.float64)
    n = vectors.shape[0]
    if identities is None:
        identities = tuple(f"u{i}" for i in range(n))
    if roles is None:
        roles = ("enrolled",) * n
    return LabeledDataset(vectors=vectors, identities=tuple(identities), roles=tuple(roles))


def blob_dataset(centers, per_blob, spread, seed, roles=None) -> LabeledDataset:
    """Tight Gaussian blobs, one identity per blob."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=np.float64)
    rows, idents = [], []
    for b, c in enumerate(centers):
        rows.append(c + rng.normal(0.0, spread, (per_blob, centers.shape[1])))
        idents.extend([f"blob{b}"] * per_blob)
    vectors = np.vstack(rows)
    if roles is None:
        roles = ("enrolled",) * len(vectors)
    return LabeledDataset(vectors=vectors, identities=tuple(idents), roles=tuple(roles))


def white_canvas(height, width):
    return np.full((height, width), 255, dtype=np.uint8)


@pytest.fixture
def two_blob_1d() -> LabeledDataset:
    return make_dataset([[0.0], [0.1], [10.0], [10.1]], identities=("a", "a", "b", "b"))
