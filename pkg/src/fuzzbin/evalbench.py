"""Benchmark harness: enrollment/probe evaluation of bin-miss and
penetration across cluster counts, synthetic dataset generation, and
report emission (CSV table plus SVG chart).

A probe is a bin miss when none of the clusters searched for it holds any
enrolled template of its own identity; penetration is the fraction of the
enrolled database scanned per probe. The fuzzy index searches the top-t
clusters by membership grade; the hard baseline is reported both with its
native single bin and with a two-nearest-centers variant.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import (
    ClusterModel,
    LabeledDataset,
    ROLE_ENROLLED,
    ROLE_PROBE,
    pairwise_sq_distances,
)
from .errors import FuzzbinError, UsageError
from .fcm import fcm_train, hard_assign, memberships_from_sq_distances
from .identify import retrieve_clusters
from .kmeans import kmeans_train, nearest_centers

DEFAULT_IDENTITY_SPREAD = 1.0
DEFAULT_WITHIN_SPREAD = 0.1
DEFAULT_ENROLLED_PER_ID = 6
DEFAULT_PROBES_PER_ID = 3
DEFAULT_DIM = 27


@dataclass(frozen=True)
class EvalRow:
    c: int
    fcm_binmiss: Optional[int] = None
    kmeans_top1_binmiss: Optional[int] = None
    kmeans_top2_binmiss: Optional[int] = None
    fcm_penetration: Optional[float] = None
    kmeans_penetration: Optional[float] = None
    failed: Optional[str] = None


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]
    probes_total: int
    seed: int


def _identity_clusters(
    enrolled: LabeledDataset, assignments: Sequence[int]
) -> dict[str, set[int]]:
    out: dict[str, set[int]] = {}
    for ident, cluster in zip(enrolled.identities, assignments):
        out.setdefault(ident, set()).add(int(cluster))
    return out


def _check_probes(enrolled: LabeledDataset, probes: LabeledDataset) -> None:
    enrolled_ids = set(enrolled.identities)
    missing = [i for i in set(probes.identities) if i not in enrolled_ids]
    if missing:
        raise UsageError(
            f"probe identities without enrolled templates: {sorted(missing)[:5]}"
        )


def _retrieved_clusters_per_probe(
    model: ClusterModel,
    probes: LabeledDataset,
    t: int,
) -> list[list[int]]:
    t_eff = min(t, model.n_clusters)
    if model.algorithm == "kmeans":
        return [
            nearest_centers(q, model, t_eff) for q in probes.vectors
        ]
    d2 = pairwise_sq_distances(probes.vectors, model.centers)
    grades = memberships_from_sq_distances(d2, model.fuzzifier)
    return [retrieve_clusters(g, t_eff) for g in grades]


def bin_miss_count(
    model: ClusterModel,
    enrolled: LabeledDataset,
    assignments: Sequence[int],
    probes: LabeledDataset,
    t: int,
) -> int:
    """Number of probes whose searched clusters hold no genuine template."""
    _check_probes(enrolled, probes)
    clusters_of = _identity_clusters(enrolled, assignments)
    retrieved = _retrieved_clusters_per_probe(model, probes, t)
    misses = 0
    for ident, ranked in zip(probes.identities, retrieved):
        if not (set(ranked) & clusters_of[ident]):
            misses += 1
    return misses


def penetration_rate(
    model: ClusterModel,
    enrolled: LabeledDataset,
    assignments: Sequence[int],
    probes: LabeledDataset,
    t: int,
) -> float:
    """Mean fraction of the enrolled database scanned per probe."""
    _check_probes(enrolled, probes)
    assignments = np.asarray(assignments)
    bin_sizes = np.bincount(assignments, minlength=model.n_clusters)
    retrieved = _retrieved_clusters_per_probe(model, probes, t)
    scanned = [int(bin_sizes[list(ranked)].sum()) for ranked in retrieved]
    return float(np.mean(scanned)) / enrolled.size


def sweep(
    data: LabeledDataset,
    c_values: Sequence[int],
    t: int = 2,
    m: float = 2.0,
    epsilon: float = 1e-5,
    seed: int = 0,
    max_iterations: int = 300,
) -> EvalReport:
    """Train both indexes per cluster count and tabulate the metrics.

    The fuzzy index is evaluated at top-t (clamped to c) and the hard
    baseline at top-1 and top-2. A training failure marks its row failed
    and the sweep continues. Deterministic per seed.
    """
    enrolled = data.enrolled_view()
    probes = data.probe_view()
    if enrolled.size == 0 or probes.size == 0:
        raise UsageError("sweep needs both enrolled and probe templates")
    _check_probes(enrolled, probes)
    for c in c_values:
        if not (1 <= c <= enrolled.size):
            raise UsageError(
                f"cluster count {c} outside 1..{enrolled.size} (enrolled count)"
            )

    rows: list[EvalRow] = []
    for c in c_values:
        try:
            fcm_model, u, _ = fcm_train(
                enrolled, c, m=m, epsilon=epsilon,
                max_iterations=max_iterations, seed=seed,
            )
            fcm_assign = hard_assign(u)
            km_model, km_labels = kmeans_train(
                enrolled, c, seed=seed, max_iterations=max_iterations
            )
            rows.append(EvalRow(
                c=c,
                fcm_binmiss=bin_miss_count(fcm_model, enrolled, fcm_assign, probes, t),
                kmeans_top1_binmiss=bin_miss_count(km_model, enrolled, km_labels, probes, 1),
                kmeans_top2_binmiss=bin_miss_count(km_model, enrolled, km_labels, probes, 2),
                fcm_penetration=penetration_rate(fcm_model, enrolled, fcm_assign, probes, t),
                kmeans_penetration=penetration_rate(km_model, enrolled, km_labels, probes, 1),
            ))
        except FuzzbinError as exc:
            rows.append(EvalRow(c=c, failed=str(exc)))
    return EvalReport(rows=tuple(rows), probes_total=probes.size, seed=seed)


def gen_synthetic(
    identities: int,
    enrolled_per_id: int = DEFAULT_ENROLLED_PER_ID,
    probes_per_id: int = DEFAULT_PROBES_PER_ID,
    dim: int = DEFAULT_DIM,
    identity_spread: float = DEFAULT_IDENTITY_SPREAD,
    within_spread: float = DEFAULT_WITHIN_SPREAD,
    seed: int = 0,
) -> LabeledDataset:
    """Synthetic stand-in for a real template database.

    One uniform prototype per identity in [0, identity_spread]^dim; each
    template is the prototype plus centered Gaussian noise of standard
    deviation ``within_spread``. Per identity the enrolled templates come
    first, then the probes. Deterministic per seed.
    """
    if identities < 1:
        raise UsageError("need at least one identity")
    if enrolled_per_id < 1 or probes_per_id < 0:
        raise UsageError("need enrolled_per_id >= 1 and probes_per_id >= 0")
    if dim < 1:
        raise UsageError("dimension must be >= 1")
    if identity_spread <= 0 or within_spread < 0:
        raise UsageError("spreads must satisfy identity_spread > 0, within_spread >= 0")

    rng = np.random.default_rng(seed)
    per_id = enrolled_per_id + probes_per_id
    prototypes = rng.random((identities, dim)) * identity_spread
    noise = rng.normal(0.0, 1.0, (identities, per_id, dim)) * within_spread
    vectors = (prototypes[:, None, :] + noise).reshape(identities * per_id, dim)

    identity_labels: list[str] = []
    roles: list[str] = []
    width = max(4, len(str(identities)))
    for i in range(identities):
        label = f"id{i + 1:0{width}d}"
        identity_labels.extend([label] * per_id)
        roles.extend([ROLE_ENROLLED] * enrolled_per_id + [ROLE_PROBE] * probes_per_id)
    return LabeledDataset(
        vectors=vectors, identities=tuple(identity_labels), roles=tuple(roles)
    )


# ----------------------------------------------------------------------------
# Report emission. The CSV mirrors the sweep schema; the SVG is a small
# hand-built line chart so identical reports serialize to identical bytes.
# ----------------------------------------------------------------------------

CSV_HEADER = "c,fcm_binmiss,kmeans_top1_binmiss,kmeans_top2_binmiss,fcm_penetration,kmeans_penetration"


def _cell_int(v: Optional[int]) -> str:
    return "" if v is None else str(v)


def _cell_rate(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.6f}"


def report_csv(report: EvalReport) -> str:
    lines = [CSV_HEADER]
    for r in report.rows:
        lines.append(",".join([
            str(r.c),
            _cell_int(r.fcm_binmiss),
            _cell_int(r.kmeans_top1_binmiss),
            _cell_int(r.kmeans_top2_binmiss),
            _cell_rate(r.fcm_penetration),
            _cell_rate(r.kmeans_penetration),
        ]))
    return "\n".join(lines) + "\n"


_SVG_W, _SVG_H = 640, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 24, 40, 56
_SERIES = (
    ("fcm_binmiss", "FCM", "#1f6fb2", ""),
    ("kmeans_top1_binmiss", "K-Means", "#c0392b", "6,4"),
)


def report_svg(report: EvalReport) -> str:
    """Line chart of bin-miss counts versus cluster count."""
    plot_w = _SVG_W - _MARGIN_L - _MARGIN_R
    plot_h = _SVG_H - _MARGIN_T - _MARGIN_B
    rows = [r for r in report.rows if r.failed is None]
    xs = [r.c for r in rows]
    all_y = [
        v for r in rows
        for v in (r.fcm_binmiss, r.kmeans_top1_binmiss, r.kmeans_top2_binmiss)
        if v is not None
    ]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0, 1)
    if x_lo == x_hi:
        x_hi = x_lo + 1
    y_hi = max(all_y) if all_y else 1
    if y_hi == 0:
        y_hi = 1

    def px(c: float) -> float:
        return _MARGIN_L + (c - x_lo) / (x_hi - x_lo) * plot_w

    def py(v: float) -> float:
        return _MARGIN_T + plot_h - v / y_hi * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<text x="{_SVG_W / 2:.1f}" y="24" text-anchor="middle" '
        'font-family="sans-serif" font-size="15">Bin-miss vs cluster count</text>',
        # axes
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{_MARGIN_T + plot_h}" stroke="black"/>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T + plot_h}" '
        f'x2="{_MARGIN_L + plot_w}" y2="{_MARGIN_T + plot_h}" stroke="black"/>',
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_SVG_H - 16}" text-anchor="middle" '
        'font-family="sans-serif" font-size="12">clusters (c)</text>',
        f'<text x="18" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 18 {_MARGIN_T + plot_h / 2:.1f})">bin-miss count</text>',
    ]
    for c in xs:
        parts.append(
            f'<text x="{px(c):.2f}" y="{_MARGIN_T + plot_h + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{c}</text>'
        )
    for frac in (0.0, 0.5, 1.0):
        v = y_hi * frac
        parts.append(
            f'<text x="{_MARGIN_L - 8}" y="{py(v) + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{v:g}</text>'
        )
    for key, label, color, dash in _SERIES:
        pts = [(r.c, getattr(r, key)) for r in rows if getattr(r, key) is not None]
        if pts:
            coords = " ".join(f"{px(c):.2f},{py(v):.2f}" for c, v in pts)
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" '
                f'stroke-width="2"{dash_attr}/>'
            )
            for c, v in pts:
                parts.append(
                    f'<circle cx="{px(c):.2f}" cy="{py(v):.2f}" r="3" fill="{color}"/>'
                )
    legend_y = _MARGIN_T + 6
    for i, (key, label, color, dash) in enumerate(_SERIES):
        y = legend_y + 18 * i
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<line x1="{_MARGIN_L + plot_w - 120}" y1="{y}" '
            f'x2="{_MARGIN_L + plot_w - 92}" y2="{y}" stroke="{color}" '
            f'stroke-width="2"{dash_attr}/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L + plot_w - 86}" y="{y + 4}" '
            f'font-family="sans-serif" font-size="12">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_report(report: EvalReport, out_dir, basename: str = "report") -> tuple[Path, Path]:
    """Write the CSV table and SVG chart; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{basename}.csv"
    svg_path = out / f"{basename}.svg"
    csv_path.write_text(report_csv(report))
    svg_path.write_text(report_svg(report))
    return csv_path, svg_path
