"""Fuzzy c-means training.

The trainer alternates two closed-form updates until the membership matrix
stops moving:

* centers: weighted means of the data under memberships raised to the
  fuzzifier exponent;
* memberships: inverse-distance-ratio grades, each row a point on the
  probability simplex.

Both updates are the exact minimizers of the weighted objective for the
other block held fixed, so the objective value never increases between
iterations. Rows whose point coincides with one or more centers receive a
uniform grade over the coincident centers and zero elsewhere; the same rule
covers distances so small that the inverse-power ratio overflows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import ClusterModel, LabeledDataset, pairwise_sq_distances
from .errors import DegenerateClusterError, UsageError

IterationHook = Callable[[int, np.ndarray, np.ndarray, float, float], None]


@dataclass(frozen=True)
class FcmTrace:
    """Per-iteration objective values and membership deltas of one run."""

    objective_per_iteration: tuple[float, ...]
    delta_per_iteration: tuple[float, ...]


def init_partition(n: int, c: int, seed: int) -> np.ndarray:
    """Seeded random row-stochastic (n, c) matrix with strictly positive entries."""
    if n < 1 or c < 1:
        raise UsageError(f"need n >= 1 and c >= 1, got n={n}, c={c}")
    if c > n:
        raise UsageError(f"more clusters than data points ({c} > {n})")
    rng = np.random.default_rng(seed)
    # 1 - U[0,1) lies in (0, 1]: normalized rows keep every entry > 0.
    grades = 1.0 - rng.random((n, c))
    return grades / grades.sum(axis=1, keepdims=True)


def compute_centers(u: np.ndarray, x: np.ndarray, m: float) -> np.ndarray:
    """Fuzzy centers: rows of (U^m)^T X scaled by the column sums of U^m."""
    u = np.asarray(u, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if u.shape[0] != x.shape[0]:
        raise UsageError(f"partition has {u.shape[0]} rows but data has {x.shape[0]}")
    if m < 1.0:
        raise UsageError(f"fuzzifier must be >= 1, got {m}")
    w = u ** m
    mass = w.sum(axis=0)
    for j, mj in enumerate(mass):
        if mj <= 0.0:
            raise DegenerateClusterError(j)
    return (w.T @ x) / mass[:, None]


def objective(u: np.ndarray, x: np.ndarray, centers: np.ndarray, m: float) -> float:
    """Weighted within-cluster scatter: sum of U^m times squared distances."""
    d2 = pairwise_sq_distances(x, centers)
    return float(np.sum((np.asarray(u, dtype=np.float64) ** m) * d2))


def memberships_from_sq_distances(d2: np.ndarray, m: float) -> np.ndarray:
    """Row-stochastic grades from an (N, c) squared-distance matrix.

    Zero distances (and distances whose inverse power overflows) dominate
    their row: the grade splits uniformly over them. Rows whose inverse
    powers all underflow to zero fall back to the uniform grade.
    """
    if m <= 1.0:
        raise UsageError(f"membership update needs fuzzifier > 1, got {m}")
    d2 = np.asarray(d2, dtype=np.float64)
    p = 1.0 / (m - 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        inv = d2 ** (-p)

    u = np.empty_like(inv)
    dominant = np.isinf(inv)
    singular_rows = dominant.any(axis=1)
    regular = ~singular_rows

    sums = inv[regular].sum(axis=1, keepdims=True)
    vanished = (sums == 0.0).ravel()
    safe = np.where(sums == 0.0, 1.0, sums)
    u[regular] = inv[regular] / safe
    if vanished.any():
        rows = np.flatnonzero(regular)[vanished]
        u[rows] = 1.0 / d2.shape[1]

    if singular_rows.any():
        counts = dominant[singular_rows].sum(axis=1, keepdims=True)
        u[singular_rows] = dominant[singular_rows] / counts
    return u


def update_memberships(x: np.ndarray, centers: np.ndarray, m: float) -> np.ndarray:
    """One membership update of all data rows against fixed centers."""
    return memberships_from_sq_distances(pairwise_sq_distances(x, centers), m)


def hard_assign(u: np.ndarray) -> np.ndarray:
    """Index of the maximum grade per row; ties go to the lowest index."""
    return np.argmax(np.asarray(u), axis=1)


def fcm_train(
    data: LabeledDataset,
    c: int,
    m: float = 2.0,
    epsilon: float = 1e-5,
    max_iterations: int = 300,
    seed: int = 0,
    iteration_hook: Optional[IterationHook] = None,
) -> tuple[ClusterModel, np.ndarray, FcmTrace]:
    """Train a fuzzy cluster index on every vector of ``data``.

    Loops center computation then membership update until the largest
    absolute membership change drops to ``epsilon`` or the iteration cap
    is hit. Deterministic for a given seed. Returns the model, the final
    partition matrix, and the iteration trace.

    ``iteration_hook(t, u, centers, objective, delta)`` is called once per
    iteration with the freshly updated partition matrix; it exists for
    instrumentation and invariant checking.
    """
    n = data.size
    if c < 1:
        raise UsageError(f"cluster count must be >= 1, got {c}")
    if c > n:
        raise UsageError(f"more clusters than data points ({c} > {n})")
    if m <= 1.0:
        raise UsageError(f"training needs fuzzifier > 1, got {m}")
    if not (0.0 < epsilon < 1.0):
        raise UsageError(f"epsilon must lie in (0, 1), got {epsilon}")
    if max_iterations < 1:
        raise UsageError("max_iterations must be >= 1")

    x = data.vectors
    u = init_partition(n, c, seed)
    objectives: list[float] = []
    deltas: list[float] = []
    centers = None
    for t in range(1, max_iterations + 1):
        centers = compute_centers(u, x, m)
        u_next = update_memberships(x, centers, m)
        delta = float(np.abs(u_next - u).max())
        j = objective(u_next, x, centers, m)
        u = u_next
        objectives.append(j)
        deltas.append(delta)
        if iteration_hook is not None:
            iteration_hook(t, u, centers, j, delta)
        if delta <= epsilon:
            break

    model = ClusterModel(
        centers=centers,
        fuzzifier=m,
        epsilon=epsilon,
        max_iterations=max_iterations,
        final_objective=objectives[-1],
        iterations_run=len(objectives),
        seed=seed,
        algorithm="fcm",
    )
    return model, u, FcmTrace(tuple(objectives), tuple(deltas))
