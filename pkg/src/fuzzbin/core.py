"""Shared data types and primitives: feature vectors, labeled datasets,
the squared Euclidean kernel, min-max normalization, and the CSV format.

Conventions used across the package:

* a feature vector is a 1-D float64 ndarray of length M;
* a dataset stores its vectors as an (N, M) float64 ndarray;
* a partition matrix is an (N, c) float64 ndarray whose rows sum to 1.

Arrays handed out by this module are marked read-only so trained state can
be shared across threads without defensive copies.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DataError, UsageError

ROLE_ENROLLED = "enrolled"
ROLE_PROBE = "probe"
ROLES = (ROLE_ENROLLED, ROLE_PROBE)

# 17 significant digits round-trip any IEEE-754 double exactly.
FLOAT_FMT = "%.17g"


def format_float(x: float) -> str:
    return FLOAT_FMT % x


def as_vector(values: Iterable[float], dim: Optional[int] = None) -> np.ndarray:
    """Validate and freeze one feature vector."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise UsageError(f"feature vector must be 1-D, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise UsageError(f"feature vector has dimension {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise DataError("feature vector contains non-finite entries")
    v = v.copy()
    v.flags.writeable = False
    return v


def squared_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Squared Euclidean distance between two vectors of equal dimension."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise UsageError(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.dot(d, d))


def pairwise_sq_distances(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between rows of ``x`` (N, M) and rows of
    ``centers`` (c, M), returned as an (N, c) array.

    Computed from explicit differences (never the expanded dot-product form)
    so results are exactly nonnegative and bit-stable for repeated calls.
    """
    x = np.asarray(x, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    if x.shape[1] != centers.shape[1]:
        raise UsageError(
            f"dimension mismatch: data is {x.shape[1]}-D, centers are {centers.shape[1]}-D"
        )
    diff = x[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


@dataclass(frozen=True)
class LabeledDataset:
    """N feature vectors with identity labels and enrollment roles."""

    vectors: np.ndarray          # (N, M), float64, read-only
    identities: tuple[str, ...]  # length N
    roles: tuple[str, ...]       # length N, each "enrolled" or "probe"

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        if v.ndim != 2:
            raise UsageError(f"vectors must be a 2-D array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DataError("dataset contains non-finite feature values")
        if len(self.identities) != v.shape[0] or len(self.roles) != v.shape[0]:
            raise UsageError("identities/roles length does not match vector count")
        for r in self.roles:
            if r not in ROLES:
                raise DataError(f"unknown role {r!r}; expected one of {ROLES}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "identities", tuple(self.identities))
        object.__setattr__(self, "roles", tuple(self.roles))

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def rows_with_role(self, role: str) -> np.ndarray:
        """Dataset row indices carrying the given role, in file order."""
        return np.array([i for i, r in enumerate(self.roles) if r == role], dtype=np.intp)

    def subset(self, rows: Sequence[int]) -> "LabeledDataset":
        rows = np.asarray(rows, dtype=np.intp)
        return LabeledDataset(
            vectors=self.vectors[rows],
            identities=tuple(self.identities[i] for i in rows),
            roles=tuple(self.roles[i] for i in rows),
        )

    def enrolled_view(self) -> "LabeledDataset":
        return self.subset(self.rows_with_role(ROLE_ENROLLED))

    def probe_view(self) -> "LabeledDataset":
        return self.subset(self.rows_with_role(ROLE_PROBE))


def orphan_probe_identities(data: LabeledDataset) -> list[str]:
    """Probe identities lacking any enrolled template; empty for a
    well-posed identification dataset."""
    enrolled_ids = {i for i, r in zip(data.identities, data.roles) if r == ROLE_ENROLLED}
    orphans = {i for i, r in zip(data.identities, data.roles) if r == ROLE_PROBE} - enrolled_ids
    return sorted(orphans)


@dataclass(frozen=True)
class Normalization:
    """Per-dimension (min, max) pairs fitted on enrolled templates only.

    ``apply`` maps each fitted dimension into [0, 1]; dimensions with
    min == max map to the constant 0.5. Probe vectors may land outside
    [0, 1]; that is intentional (the fit never sees query-time data).
    """

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=np.float64).copy()
        maxs = np.asarray(self.maxs, dtype=np.float64).copy()
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise UsageError("normalization mins/maxs must be 1-D arrays of equal length")
        if np.any(maxs < mins):
            raise UsageError("normalization max < min")
        mins.flags.writeable = False
        maxs.flags.writeable = False
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @property
    def dimension(self) -> int:
        return self.mins.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dimension:
            raise UsageError(
                f"dimension mismatch: vector is {x.shape[-1]}-D, normalization is {self.dimension}-D"
            )
        span = self.maxs - self.mins
        degenerate = span == 0.0
        safe_span = np.where(degenerate, 1.0, span)
        out = (x - self.mins) / safe_span
        return np.where(degenerate, 0.5, out)

    def invert(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        span = self.maxs - self.mins
        degenerate = span == 0.0
        out = x * np.where(degenerate, 1.0, span) + self.mins
        return np.where(degenerate, self.mins, out)


def normalize_fit(data: LabeledDataset) -> Normalization:
    """Fit per-dimension (min, max) pairs on the enrolled vectors only."""
    if data.size == 0:
        raise UsageError("cannot fit normalization on an empty dataset")
    enrolled = data.rows_with_role(ROLE_ENROLLED)
    if enrolled.size == 0:
        raise UsageError("cannot fit normalization: dataset has no enrolled templates")
    sub = data.vectors[enrolled]
    return Normalization(mins=sub.min(axis=0), maxs=sub.max(axis=0))


@dataclass(frozen=True)
class ClusterModel:
    """A trained cluster index: centers plus the hyperparameters and the
    normalization state needed to reproduce query-side membership grades.

    A hard (k-means) model is stored with ``fuzzifier == 1.0`` and
    ``epsilon == 0.0`` as sentinels; the fuzzy query path refuses it.
    """

    centers: np.ndarray          # (c, M), float64, read-only
    fuzzifier: float
    epsilon: float
    max_iterations: int
    final_objective: float
    iterations_run: int
    seed: int
    normalization: Optional[Normalization] = None
    algorithm: str = "fcm"

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=np.float64)
        if c.ndim != 2 or c.shape[0] < 1:
            raise UsageError(f"centers must be a (c, M) array with c >= 1, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise DataError("cluster centers contain non-finite values")
        if self.fuzzifier < 1.0:
            raise UsageError(f"fuzzifier must be >= 1, got {self.fuzzifier}")
        if not (0.0 <= self.epsilon < 1.0):
            raise UsageError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if self.max_iterations < 1:
            raise UsageError("max_iterations must be >= 1")
        if self.final_objective < 0.0:
            raise UsageError("final_objective must be nonnegative")
        if self.algorithm not in ("fcm", "kmeans"):
            raise UsageError(f"unknown algorithm {self.algorithm!r}")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "centers", c)
        if self.normalization is not None and self.normalization.dimension != c.shape[1]:
            raise UsageError("normalization dimension does not match centers")

    @property
    def n_clusters(self) -> int:
        return self.centers.shape[0]

    @property
    def dimension(self) -> int:
        return self.centers.shape[1]


# ----------------------------------------------------------------------------
# CSV dataset format: header "identity,role,f1,...,fM", one row per template.
# ----------------------------------------------------------------------------

def _expected_header(dim: int) -> list[str]:
    return ["identity", "role"] + [f"f{i + 1}" for i in range(dim)]


def save_csv(data: LabeledDataset, path) -> None:
    """Write a dataset in the self-describing CSV schema.

    Reals are rendered with 17 significant digits so a load/save cycle
    reproduces every 64-bit value exactly.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_expected_header(data.dimension))
        for ident, role, vec in zip(data.identities, data.roles, data.vectors):
            w.writerow([ident, role] + [format_float(x) for x in vec])


def load_csv(path) -> LabeledDataset:
    """Parse a dataset CSV; malformed rows raise DataError naming the line."""
    with open(path, "r", newline="") as fh:
        return parse_csv(fh.read(), source=str(path))


def parse_csv(text: str, source: str = "<string>") -> LabeledDataset:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError(f"{source}: empty file") from None
    if len(header) < 3 or header[0] != "identity" or header[1] != "role":
        raise DataError(
            f"{source}: line 1: expected header 'identity,role,f1,...', got {','.join(header[:4])}..."
        )
    dim = len(header) - 2
    if header != _expected_header(dim):
        raise DataError(f"{source}: line 1: malformed feature column names")

    identities: list[str] = []
    roles: list[str] = []
    rows: list[list[float]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue  # trailing blank line
        if len(row) != dim + 2:
            raise DataError(
                f"{source}: line {lineno}: expected {dim + 2} fields, got {len(row)}"
            )
        ident, role = row[0], row[1]
        if role not in ROLES:
            raise DataError(
                f"{source}: line {lineno}: unknown role {role!r} (expected enrolled|probe)"
            )
        try:
            values = [float(cell) for cell in row[2:]]
        except ValueError as exc:
            raise DataError(f"{source}: line {lineno}: non-numeric cell ({exc})") from None
        if not all(np.isfinite(values)):
            raise DataError(f"{source}: line {lineno}: non-finite feature value")
        identities.append(ident)
        roles.append(role)
        rows.append(values)

    if not rows:
        raise DataError(f"{source}: no data rows")
    try:
        data = LabeledDataset(
            vectors=np.array(rows, dtype=np.float64),
            identities=tuple(identities),
            roles=tuple(roles),
        )
    except (DataError, UsageError) as exc:
        raise DataError(f"{source}: {exc}") from None
    orphans = orphan_probe_identities(data)
    if orphans:
        raise DataError(
            f"{source}: probe identities without any enrolled template: {orphans[:5]}"
        )
    return data
