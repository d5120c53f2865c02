"""Line-oriented text format for trained models.

The file is inspectable and diffable: a versioned header of key/value
lines, one center row per cluster, and the hard assignment of every
enrolled template (dataset row index to cluster). Reals carry 17
significant digits, so load(save(model)) reproduces every center
bit-for-bit and save(load(path)) is byte-identical.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import ClusterModel, Normalization, format_float
from .errors import DataError

FORMAT_VERSION = "fuzzbin-model v1"


def render_model(model: ClusterModel, assignments: Sequence[tuple[int, int]]) -> str:
    """Serialize a model plus its (row, cluster) enrollment assignments."""
    lines = [
        FORMAT_VERSION,
        f"algorithm {model.algorithm}",
        f"dimension {model.dimension}",
        f"clusters {model.n_clusters}",
        f"fuzzifier {format_float(model.fuzzifier)}",
        f"epsilon {format_float(model.epsilon)}",
        f"max_iterations {model.max_iterations}",
        f"seed {model.seed}",
        f"iterations_run {model.iterations_run}",
        f"final_objective {format_float(model.final_objective)}",
    ]
    if model.normalization is None:
        lines.append("normalization none")
    else:
        lines.append("normalization minmax")
        lines.append(" ".join(format_float(v) for v in model.normalization.mins))
        lines.append(" ".join(format_float(v) for v in model.normalization.maxs))
    lines.append("centers")
    for row in model.centers:
        lines.append(" ".join(format_float(v) for v in row))
    lines.append("assignments")
    for row, cluster in assignments:
        lines.append(f"{row} {cluster}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def save_model(path, model: ClusterModel, assignments: Sequence[tuple[int, int]]) -> None:
    Path(path).write_text(render_model(model, assignments))


class _Lines:
    def __init__(self, text: str, source: str):
        self.lines = text.splitlines()
        self.idx = 0
        self.source = source

    def next(self, what: str) -> str:
        if self.idx >= len(self.lines):
            raise DataError(f"{self.source}: truncated file, expected {what}")
        line = self.lines[self.idx]
        self.idx += 1
        return line

    def next_field(self, key: str) -> str:
        line = self.next(key)
        parts = line.split(None, 1)
        if len(parts) != 2 or parts[0] != key:
            raise DataError(f"{self.source}: line {self.idx}: expected '{key} <value>', got {line!r}")
        return parts[1]

    def fail(self, message: str):
        raise DataError(f"{self.source}: line {self.idx}: {message}")


def _parse_floats(lines: _Lines, what: str, count: int) -> np.ndarray:
    raw = lines.next(what).split()
    if len(raw) != count:
        lines.fail(f"expected {count} values for {what}, got {len(raw)}")
    try:
        return np.array([float(v) for v in raw], dtype=np.float64)
    except ValueError:
        lines.fail(f"non-numeric value in {what}")


def load_model(path) -> tuple[ClusterModel, list[tuple[int, int]]]:
    source = str(path)
    text = Path(path).read_text()
    return parse_model(text, source=source)


def parse_model(text: str, source: str = "<string>") -> tuple[ClusterModel, list[tuple[int, int]]]:
    lines = _Lines(text, source)
    version = lines.next("version header")
    if version != FORMAT_VERSION:
        raise DataError(f"{source}: unsupported format header {version!r}")
    try:
        algorithm = lines.next_field("algorithm")
        dimension = int(lines.next_field("dimension"))
        clusters = int(lines.next_field("clusters"))
        fuzzifier = float(lines.next_field("fuzzifier"))
        epsilon = float(lines.next_field("epsilon"))
        max_iterations = int(lines.next_field("max_iterations"))
        seed = int(lines.next_field("seed"))
        iterations_run = int(lines.next_field("iterations_run"))
        final_objective = float(lines.next_field("final_objective"))
    except ValueError as exc:
        raise DataError(f"{source}: malformed header field ({exc})") from None

    norm_kind = lines.next_field("normalization")
    normalization: Optional[Normalization] = None
    if norm_kind == "minmax":
        mins = _parse_floats(lines, "normalization mins", dimension)
        maxs = _parse_floats(lines, "normalization maxs", dimension)
        normalization = Normalization(mins=mins, maxs=maxs)
    elif norm_kind != "none":
        lines.fail(f"unknown normalization kind {norm_kind!r}")

    if lines.next("centers marker") != "centers":
        lines.fail("expected 'centers' marker")
    centers = np.vstack([
        _parse_floats(lines, f"center row {j}", dimension) for j in range(clusters)
    ])

    if lines.next("assignments marker") != "assignments":
        lines.fail("expected 'assignments' marker")
    assignments: list[tuple[int, int]] = []
    while True:
        line = lines.next("assignment row or 'end'")
        if line == "end":
            break
        parts = line.split()
        if len(parts) != 2:
            lines.fail(f"malformed assignment row {line!r}")
        try:
            row, cluster = int(parts[0]), int(parts[1])
        except ValueError:
            lines.fail(f"non-integer assignment row {line!r}")
        if not (0 <= cluster < clusters):
            lines.fail(f"assignment to unknown cluster {cluster}")
        assignments.append((row, cluster))

    model = ClusterModel(
        centers=centers,
        fuzzifier=fuzzifier,
        epsilon=epsilon,
        max_iterations=max_iterations,
        final_objective=final_objective,
        iterations_run=iterations_run,
        seed=seed,
        normalization=normalization,
        algorithm=algorithm,
    )
    return model, assignments
