"""Dataset ingestion, synthetic multi-view generation, and report persistence.

On disk, view CSVs store instances as rows (the human convention); in memory
every view is d_v x n with instances as columns, which is what the optimizer
expects. The loader does the transpose.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

METRIC_RANGES = {"nmi": (0.0, 1.0), "ari": (-1.0, 1.0), "acc": (0.0, 1.0), "pur": (0.0, 1.0)}


class DataError(Exception):
    """Malformed dataset, manifest, or report."""


@dataclass(frozen=True)
class MultiViewDataset:
    """Immutable collection of views over one set of instances.

    views : list of d_v x n arrays, columns are instances
    labels : optional length-n integer vector, remapped to 0..n_classes-1
    names : one identifier per view
    """

    views: list
    labels: np.ndarray | None = None
    names: list = field(default_factory=list)

    def __post_init__(self):
        if not self.views:
            raise DataError("dataset needs at least one view")
        views = []
        for i, v in enumerate(self.views):
            a = np.asarray(v, dtype=float)
            if a.ndim != 2:
                raise DataError(f"view {i} must be 2-D, got shape {a.shape}")
            if not np.isfinite(a).all():
                raise DataError(f"view {i} contains non-numeric or non-finite cells")
            if a.shape[0] < 1:
                raise DataError(f"view {i} has no features")
            views.append(a)
        n = views[0].shape[1]
        if n < 2:
            raise DataError(f"need at least 2 instances, got {n}")
        for i, a in enumerate(views):
            if a.shape[1] != n:
                raise DataError(
                    f"view {i} has {a.shape[1]} instances, expected {n}"
                )
        object.__setattr__(self, "views", views)

        if self.labels is not None:
            lab = np.asarray(self.labels)
            if lab.ndim != 1 or lab.shape[0] != n:
                raise DataError(f"labels must be a length-{n} vector, got shape {lab.shape}")
            if not np.issubdtype(lab.dtype, np.integer):
                as_int = lab.astype(np.int64)
                if not np.array_equal(as_int, lab):
                    raise DataError("labels must be integers")
                lab = as_int
            # Remap to dense 0-based codes so downstream code can index by label.
            _, lab = np.unique(lab, return_inverse=True)
            object.__setattr__(self, "labels", lab.astype(np.int64))

        names = list(self.names) if self.names else [f"view{i}" for i in range(len(views))]
        if len(names) != len(views):
            raise DataError(f"{len(names)} names for {len(views)} views")
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.views[0].shape[1]

    @property
    def n_views(self) -> int:
        return len(self.views)


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a desk-scale multi-view clustering problem.

    cluster_separation is the distance from the origin to each cluster
    center; noise_sigma is the per-coordinate noise scale. A floor(V *
    inconsistent_view_fraction) suffix of the views gets structured
    per-instance corruption: each instance's noise direction is steered
    toward the center of a randomly shuffled partner's cluster, emulating a
    view that disagrees with the consensus. All randomness is from seed.
    """

    n_clusters: int = 3
    instances_per_cluster: int = 20
    view_dims: tuple = (60, 80)
    cluster_separation: float = 10.0
    noise_sigma: float = 0.5
    inconsistent_view_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_clusters < 1 or self.instances_per_cluster < 1:
            raise DataError("counts must be at least 1")
        if not self.view_dims or any(d < 1 for d in self.view_dims):
            raise DataError("view_dims must be positive")
        if self.noise_sigma < 0:
            raise DataError("noise_sigma must be nonnegative")
        if not 0.0 <= self.inconsistent_view_fraction <= 1.0:
            raise DataError("inconsistent_view_fraction must be in [0, 1]")
        object.__setattr__(self, "view_dims", tuple(int(d) for d in self.view_dims))


def generate_synthetic(spec: SyntheticSpec) -> MultiViewDataset:
    """Draw a labeled multi-view dataset per the spec's recipe."""
    rng = np.random.default_rng(spec.seed)
    k = spec.n_clusters
    m = spec.instances_per_cluster
    n = k * m
    labels = np.repeat(np.arange(k), m)
    n_views = len(spec.view_dims)
    n_inconsistent = math.floor(n_views * spec.inconsistent_view_fraction)

    views = []
    for vi, d in enumerate(spec.view_dims):
        centers = rng.standard_normal((d, k))
        norms = np.linalg.norm(centers, axis=0)
        norms[norms == 0] = 1.0
        centers = spec.cluster_separation * centers / norms

        x = centers[:, labels] + spec.noise_sigma * rng.standard_normal((d, n))

        if vi >= n_views - n_inconsistent and k > 1:
            # Steer each instance's noise toward its shuffled partner's
            # cluster center; partners in the same cluster add nothing, so
            # the corruption is cross-cluster by construction.
            partner = rng.permutation(n)
            pull = np.abs(rng.standard_normal(n)) + 1.0
            for i in range(n):
                ci, cj = labels[i], labels[partner[i]]
                if ci == cj:
                    continue
                direction = centers[:, cj] - centers[:, ci]
                direction /= np.linalg.norm(direction)
                x[:, i] += spec.noise_sigma * pull[i] * direction

        views.append(x)

    return MultiViewDataset(views=views, labels=labels)


def _load_view_csv(path: Path, header: bool) -> np.ndarray:
    if not path.exists():
        raise DataError(f"view file not found: {path}")
    try:
        rows = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    except ValueError as exc:
        raise DataError(f"non-numeric cell in {path}: {exc}") from exc
    # On disk instances are rows; in memory they are columns.
    return rows.T


def load_manifest(path) -> MultiViewDataset:
    """Load a dataset described by a JSON manifest.

    Manifest schema: {"views": [{"name": str, "path": str, "header": bool?}],
    "labels": str?, "standardize": bool?}. Relative paths resolve against
    the manifest's directory. With "standardize": true each feature is
    z-scored across instances (constant features become all-zero rows).
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"manifest not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "views" not in doc or not doc["views"]:
        raise DataError("manifest must contain a non-empty 'views' list")

    base = path.parent
    views, names = [], []
    for entry in doc["views"]:
        if "path" not in entry:
            raise DataError(f"view entry missing 'path': {entry}")
        views.append(_load_view_csv(base / entry["path"], bool(entry.get("header", False))))
        names.append(entry.get("name", f"view{len(names)}"))

    labels = None
    if doc.get("labels"):
        lab_path = base / doc["labels"]
        if not lab_path.exists():
            raise DataError(f"labels file not found: {lab_path}")
        try:
            labels = np.loadtxt(lab_path, dtype=np.int64, ndmin=1)
        except ValueError as exc:
            raise DataError(f"non-integer label in {lab_path}: {exc}") from exc

    if doc.get("standardize", False):
        views = [standardize_features(v) for v in views]

    return MultiViewDataset(views=views, labels=labels, names=names)


def standardize_features(x: np.ndarray) -> np.ndarray:
    """Z-score each feature (row) across instances; constant rows become 0."""
    mean = x.mean(axis=1, keepdims=True)
    std = x.std(axis=1, keepdims=True)
    centered = x - mean
    nonconstant = std[:, 0] > 0
    out = np.zeros_like(centered)
    out[nonconstant] = centered[nonconstant] / std[nonconstant]
    return out


def save_dataset(dataset: MultiViewDataset, directory, standardize: bool = False) -> Path:
    """Write view CSVs, labels, and a manifest; return the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for name, view in zip(dataset.names, dataset.views):
        fname = f"{name}.csv"
        # %.17g round-trips float64 exactly through text.
        np.savetxt(directory / fname, view.T, delimiter=",", fmt="%.17g")
        entries.append({"name": name, "path": fname})
    doc = {"views": entries, "standardize": standardize}
    if dataset.labels is not None:
        np.savetxt(directory / "labels.txt", dataset.labels, fmt="%d")
        doc["labels"] = "labels.txt"
    manifest = directory / "manifest.json"
    manifest.write_text(json.dumps(doc, indent=2) + "\n")
    return manifest


@dataclass(frozen=True)
class ClusterReport:
    """One clustering run: labels out, scores, trace, timings, config echo."""

    labels: np.ndarray
    metrics: dict | None
    trace: list
    timings: dict
    config: dict

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64)
        if lab.ndim != 1:
            raise DataError("report labels must be a 1-D vector")
        object.__setattr__(self, "labels", lab)
        if self.metrics is not None:
            for key, (lo, hi) in METRIC_RANGES.items():
                if key not in self.metrics:
                    raise DataError(f"metrics missing {key!r}")
                val = float(self.metrics[key])
                if not (lo <= val <= hi):
                    raise DataError(f"metric {key}={val} outside [{lo}, {hi}]")

    def to_dict(self) -> dict:
        doc = {
            "labels": self.labels.tolist(),
            "metrics": None if self.metrics is None else {k: float(v) for k, v in self.metrics.items()},
            "trace": [
                {
                    "iter": int(r["iter"]),
                    "lagrangian": float(r["lagrangian"]),
                    "objective": float(r["objective"]),
                    "primal_residual": float(r["primal_residual"]),
                }
                for r in self.trace
            ],
            "timings": {k: float(v) for k, v in self.timings.items()},
            "config": self.config,
        }
        return doc


def report_from_dict(doc: dict) -> ClusterReport:
    return ClusterReport(
        labels=np.asarray(doc["labels"], dtype=np.int64),
        metrics=doc.get("metrics"),
        trace=doc.get("trace", []),
        timings=doc.get("timings", {}),
        config=doc.get("config", {}),
    )


def _reject_non_finite(doc) -> None:
    if isinstance(doc, dict):
        for v in doc.values():
            _reject_non_finite(v)
    elif isinstance(doc, (list, tuple)):
        for v in doc:
            _reject_non_finite(v)
    elif isinstance(doc, float) and not math.isfinite(doc):
        raise DataError("report contains a non-finite number")


def write_report(report: ClusterReport, path, format: str = "json") -> None:
    """Persist a report as canonical JSON or a markdown metric table."""
    doc = report.to_dict()
    _reject_non_finite(doc)
    path = Path(path)
    if format == "json":
        path.write_text(json.dumps(doc, indent=2) + "\n")
    elif format in ("md", "markdown", "markdown-table"):
        path.write_text(report_markdown(report))
    else:
        raise DataError(f"unknown report format {format!r}")


def report_markdown(report: ClusterReport) -> str:
    lines = ["| metric | score |", "| --- | --- |"]
    if report.metrics:
        for key in ("nmi", "ari", "acc", "pur"):
            lines.append(f"| {key.upper()} | {float(report.metrics[key]):.4f} |")
    else:
        lines.append("| (no ground-truth labels) | - |")
    lines.append("")
    if report.trace:
        last = report.trace[-1]
        lines.append(
            f"iterations: {int(last['iter']) + 1}, "
            f"final objective: {float(last['objective']):.6g}, "
            f"primal residual: {float(last['primal_residual']):.3e}"
        )
    for phase, secs in report.timings.items():
        lines.append(f"- {phase}: {float(secs):.3f}s")
    lines.append("")
    return "\n".join(lines)


def read_report(path) -> ClusterReport:
    doc = json.loads(Path(path).read_text())
    return report_from_dict(doc)
