"""Query-time retrieval: grade the query against the trained centers, search
the few clusters with the highest grades, match within the survivors.

Because the centers are frozen at query time, the iterative membership
update collapses to a single closed-form evaluation: applying the update a
second time reproduces the same grades exactly, so the query grade vector is
computed in one step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ClusterModel, LabeledDataset, pairwise_sq_distances
from .errors import UsageError
from .fcm import memberships_from_sq_distances

DEFAULT_TOP = 2


@dataclass(frozen=True)
class IdentificationResult:
    ranked_clusters: tuple[int, ...]       # descending membership, distinct
    query_memberships: np.ndarray          # c grades summing to 1
    candidate_count: int                   # templates scanned
    best_identity: Optional[str]
    best_distance: Optional[float]         # Euclidean, None iff no candidates


def _query_sq_distances(q: np.ndarray, model: ClusterModel) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (model.dimension,):
        raise UsageError(
            f"query has shape {q.shape}, model expects ({model.dimension},)"
        )
    return pairwise_sq_distances(q[None, :], model.centers)[0]


def query_distances(q: np.ndarray, model: ClusterModel) -> np.ndarray:
    """Euclidean distance from the query to every cluster center."""
    return np.sqrt(_query_sq_distances(q, model))


def query_memberships(q: np.ndarray, model: ClusterModel) -> np.ndarray:
    """Membership grades of the query against the frozen centers.

    Uses the model's fuzzifier; refuses hard models (fuzzifier 1.0).
    """
    d2 = _query_sq_distances(q, model)
    return memberships_from_sq_distances(d2[None, :], model.fuzzifier)[0]


def retrieve_clusters(grades: np.ndarray, t: int = DEFAULT_TOP) -> list[int]:
    """Indices of the t largest grades, descending; ties to the lower index."""
    grades = np.asarray(grades, dtype=np.float64)
    c = grades.shape[0]
    if not (1 <= t <= c):
        raise UsageError(f"need 1 <= t <= {c}, got t={t}")
    order = np.argsort(-grades, kind="stable")
    return [int(j) for j in order[:t]]


def identify(
    q: np.ndarray,
    model: ClusterModel,
    enrolled: LabeledDataset,
    assignments: Sequence[int],
    t: int = DEFAULT_TOP,
) -> IdentificationResult:
    """Search the top-t clusters for the enrolled template nearest the query.

    ``q`` and ``enrolled`` must already live in the model's feature space
    (callers apply the model's stored normalization first). ``assignments``
    are the hard assignments of the enrolled templates under this model.
    Exact distance ties resolve to the lowest template index; an empty
    candidate set yields ``best_identity is None``.
    """
    assignments = np.asarray(assignments, dtype=np.intp)
    if assignments.shape[0] != enrolled.size:
        raise UsageError(
            f"{assignments.shape[0]} assignments for {enrolled.size} enrolled templates"
        )
    if enrolled.dimension != model.dimension:
        raise UsageError(
            f"enrolled data is {enrolled.dimension}-D, model expects {model.dimension}-D"
        )
    grades = query_memberships(q, model)
    ranked = retrieve_clusters(grades, t)

    candidate_mask = np.isin(assignments, ranked)
    candidates = np.flatnonzero(candidate_mask)
    if candidates.size == 0:
        return IdentificationResult(
            ranked_clusters=tuple(ranked),
            query_memberships=grades,
            candidate_count=0,
            best_identity=None,
            best_distance=None,
        )

    q = np.asarray(q, dtype=np.float64)
    d2 = pairwise_sq_distances(q[None, :], enrolled.vectors[candidates])[0]
    best = int(candidates[int(np.argmin(d2))])
    return IdentificationResult(
        ranked_clusters=tuple(ranked),
        query_memberships=grades,
        candidate_count=int(candidates.size),
        best_identity=enrolled.identities[best],
        best_distance=float(np.sqrt(d2.min())),
    )


def exhaustive_identify(q: np.ndarray, enrolled: LabeledDataset) -> tuple[str, float]:
    """Nearest-neighbor scan over every enrolled template (the t = c case)."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (enrolled.dimension,):
        raise UsageError(
            f"query has shape {q.shape}, enrolled data is {enrolled.dimension}-D"
        )
    d2 = pairwise_sq_distances(q[None, :], enrolled.vectors)[0]
    best = int(np.argmin(d2))
    return enrolled.identities[best], float(np.sqrt(d2[best]))
