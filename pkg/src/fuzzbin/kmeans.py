"""Hard-clustering baseline: seeded Lloyd iteration.

Kept deliberately minimal so the comparison against the fuzzy index stays
about the retrieval strategy, not about initialization tricks. Centers start
at c distinct data points drawn by seed; assignment ties break toward the
lowest center index; a cluster that empties out is re-centered on the point
farthest from its nearest center, which keeps the within-cluster scatter
non-increasing.
"""

from __future__ import annotations

import numpy as np

from .core import ClusterModel, LabeledDataset, pairwise_sq_distances
from .errors import UsageError


def kmeans_train(
    data: LabeledDataset,
    c: int,
    seed: int = 0,
    max_iterations: int = 300,
) -> tuple[ClusterModel, np.ndarray]:
    """Lloyd iteration until assignments stop changing or the cap is hit.

    Returns the trained model (fuzzifier recorded as the sentinel 1.0) and
    the final assignment of every vector in ``data``.
    """
    n = data.size
    if c < 1:
        raise UsageError(f"cluster count must be >= 1, got {c}")
    if c > n:
        raise UsageError(f"more clusters than data points ({c} > {n})")
    if max_iterations < 1:
        raise UsageError("max_iterations must be >= 1")

    x = data.vectors
    rng = np.random.default_rng(seed)
    centers = x[rng.choice(n, size=c, replace=False)].copy()

    labels = None
    sse = 0.0
    iterations = 0
    while iterations < max_iterations:
        d2 = pairwise_sq_distances(x, centers)
        new_labels = np.argmin(d2, axis=1)  # ties go to the lowest index
        sse = float(d2[np.arange(n), new_labels].sum())
        iterations += 1
        converged = labels is not None and np.array_equal(new_labels, labels)
        labels = new_labels
        if converged or iterations == max_iterations:
            break

        counts = np.bincount(labels, minlength=c)
        for j in range(c):
            if counts[j] > 0:
                centers[j] = x[labels == j].mean(axis=0)
        for j in range(c):
            if counts[j] == 0:
                # farthest point from its nearest center; recompute after
                # every re-center so stacked empties stay deterministic
                nearest = pairwise_sq_distances(x, centers).min(axis=1)
                centers[j] = x[int(np.argmax(nearest))]

    model = ClusterModel(
        centers=centers,
        fuzzifier=1.0,
        epsilon=0.0,
        max_iterations=max_iterations,
        final_objective=sse,
        iterations_run=iterations,
        seed=seed,
        algorithm="kmeans",
    )
    return model, labels


def kmeans_assign(q: np.ndarray, model: ClusterModel) -> int:
    """Index of the nearest center; ties go to the lowest index."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (model.dimension,):
        raise UsageError(
            f"query has shape {q.shape}, model expects ({model.dimension},)"
        )
    d2 = pairwise_sq_distances(q[None, :], model.centers)[0]
    return int(np.argmin(d2))


def nearest_centers(q: np.ndarray, model: ClusterModel, t: int) -> list[int]:
    """Indices of the t nearest centers, closest first, ties to lower index."""
    if not (1 <= t <= model.n_clusters):
        raise UsageError(f"need 1 <= t <= {model.n_clusters}, got {t}")
    q = np.asarray(q, dtype=np.float64)
    d2 = pairwise_sq_distances(q[None, :], model.centers)[0]
    order = np.argsort(d2, kind="stable")
    return [int(j) for j in order[:t]]
