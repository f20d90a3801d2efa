"""Tests for dataset loading, synthetic generation, and report persistence."""

import json

import numpy as np
import pytest

from jsmc.data import (
    ClusterReport,
    DataError,
    MultiViewDataset,
    SyntheticSpec,
    generate_synthetic,
    load_manifest,
    read_report,
    report_from_dict,
    report_markdown,
    save_dataset,
    standardize_features,
    write_report,
)
from jsmc.graphs import knn_graph
from jsmc.metrics import nmi
from jsmc.spectral import SpectralConfig, spectral_partition


def small_report():
    return ClusterReport(
        labels=np.array([0, 1, 0, 1]),
        metrics={"nmi": 0.9, "ari": 0.8, "acc": 0.95, "pur": 0.95},
        trace=[
            {"iter": 0, "lagrangian": 5.0, "objective": 6.0, "primal_residual": 0.1},
            {"iter": 1, "lagrangian": 4.0, "objective": 5.0, "primal_residual": 0.01},
        ],
        timings={"fit": 0.5, "total": 0.6},
        config={"alpha": 1.0},
    )


def test_dataset_validates_views():
    with pytest.raises(DataError):
        MultiViewDataset(views=[])
    with pytest.raises(DataError):
        MultiViewDataset(views=[np.zeros((3, 4)), np.zeros((2, 5))])
    with pytest.raises(DataError):
        MultiViewDataset(views=[np.zeros((3, 1))])
    with pytest.raises(DataError):
        MultiViewDataset(views=[np.array([[1.0, np.nan]])])
    with pytest.raises(DataError):
        MultiViewDataset(views=[np.zeros(4)])


def test_dataset_validates_labels():
    views = [np.zeros((2, 4))]
    with pytest.raises(DataError):
        MultiViewDataset(views=views, labels=np.array([0, 1]))
    with pytest.raises(DataError):
        MultiViewDataset(views=views, labels=np.array([0.5, 1, 0, 1]))
    ds = MultiViewDataset(views=views, labels=np.array([10, 30, 10, 20]))
    # labels are remapped to dense 0-based codes
    assert np.array_equal(ds.labels, [0, 2, 0, 1])


def test_dataset_default_names():
    ds = MultiViewDataset(views=[np.zeros((2, 3)), np.zeros((4, 3))])
    assert ds.names == ["view0", "view1"]
    assert ds.n == 3 and ds.n_views == 2
    with pytest.raises(DataError):
        MultiViewDataset(views=[np.zeros((2, 3))], names=["a", "b"])


def test_synthetic_spec_validation():
    with pytest.raises(DataError):
        SyntheticSpec(n_clusters=0)
    with pytest.raises(DataError):
        SyntheticSpec(view_dims=())
    with pytest.raises(DataError):
        SyntheticSpec(noise_sigma=-1.0)
    with pytest.raises(DataError):
        SyntheticSpec(inconsistent_view_fraction=1.5)


def test_synthetic_shapes_and_labels():
    ds = generate_synthetic(SyntheticSpec(n_clusters=3, instances_per_cluster=4, view_dims=(5, 7), seed=0))
    assert ds.n == 12 and ds.n_views == 2
    assert ds.views[0].shape == (5, 12) and ds.views[1].shape == (7, 12)
    assert np.array_equal(ds.labels, np.repeat([0, 1, 2], 4))


def test_synthetic_zero_noise_collapses_clusters():
    ds = generate_synthetic(SyntheticSpec(noise_sigma=0.0, seed=3))
    for view in ds.views:
        for c in range(3):
            cols = view[:, ds.labels == c]
            assert np.abs(cols - cols[:, :1]).max() == 0.0


def test_synthetic_deterministic_under_seed():
    spec = SyntheticSpec(noise_sigma=1.5, inconsistent_view_fraction=0.5, seed=11)
    a = generate_synthetic(spec)
    b = generate_synthetic(spec)
    for va, vb in zip(a.views, b.views):
        assert np.array_equal(va, vb)
    assert np.array_equal(a.labels, b.labels)
    c = generate_synthetic(SyntheticSpec(noise_sigma=1.5, inconsistent_view_fraction=0.5, seed=12))
    assert not np.array_equal(a.views[0], c.views[0])


def test_synthetic_corruption_touches_only_suffix_views():
    clean = generate_synthetic(SyntheticSpec(seed=5))
    dirty = generate_synthetic(SyntheticSpec(inconsistent_view_fraction=0.5, seed=5))
    # floor(2 * 0.5) = 1: only the last view gets the decoy pull
    assert np.array_equal(clean.views[0], dirty.views[0])
    assert not np.array_equal(clean.views[1], dirty.views[1])


def test_synthetic_single_view_is_clusterable(standard_dataset):
    graph = knn_graph(standard_dataset.views[0], k=5)
    pred = spectral_partition(graph, SpectralConfig(n_clusters=3, seed=0))
    assert nmi(standard_dataset.labels, pred) >= 0.9


def test_standardize_features():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((4, 50)) * 3.0 + 5.0
    x[2] = 7.7  # constant feature
    z = standardize_features(x)
    assert np.abs(z.mean(axis=1)).max() <= 1e-10
    stds = z.std(axis=1)
    assert np.abs(stds[[0, 1, 3]] - 1.0).max() <= 1e-10
    assert np.abs(z[2]).max() == 0.0


def test_manifest_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    ds = MultiViewDataset(
        views=[rng.standard_normal((3, 6)), rng.standard_normal((5, 6))],
        labels=np.array([0, 0, 1, 1, 2, 2]),
        names=["a", "b"],
    )
    manifest = save_dataset(ds, tmp_path / "out")
    loaded = load_manifest(manifest)
    assert loaded.n == 6 and loaded.n_views == 2
    assert loaded.names == ["a", "b"]
    for orig, back in zip(ds.views, loaded.views):
        assert np.abs(orig - back).max() <= 1e-12
    assert np.array_equal(loaded.labels, ds.labels)


def test_manifest_two_views_four_instances(tmp_path):
    (tmp_path / "v0.csv").write_text("1,2\n3,4\n5,6\n7,8\n")
    (tmp_path / "v1.csv").write_text("1,2,3\n4,5,6\n7,8,9\n10,11,12\n")
    (tmp_path / "m.json").write_text(json.dumps({
        "views": [{"name": "v0", "path": "v0.csv"}, {"name": "v1", "path": "v1.csv"}],
    }))
    ds = load_manifest(tmp_path / "m.json")
    assert ds.n_views == 2 and ds.n == 4
    # on-disk rows are instances, in-memory columns are instances
    assert ds.views[0].shape == (2, 4)
    assert np.array_equal(ds.views[0][:, 0], [1.0, 2.0])


def test_manifest_shape_mismatch(tmp_path):
    (tmp_path / "v0.csv").write_text("1,2\n3,4\n5,6\n7,8\n")
    (tmp_path / "v1.csv").write_text("1\n2\n3\n4\n5\n")
    (tmp_path / "m.json").write_text(json.dumps({
        "views": [{"path": "v0.csv"}, {"path": "v1.csv"}],
    }))
    with pytest.raises(DataError):
        load_manifest(tmp_path / "m.json")


def test_manifest_standardize_flag(tmp_path):
    rng = np.random.default_rng(8)
    ds = MultiViewDataset(views=[rng.standard_normal((4, 30)) * 2 + 3])
    manifest = save_dataset(ds, tmp_path, standardize=True)
    loaded = load_manifest(manifest)
    z = loaded.views[0]
    assert np.abs(z.mean(axis=1)).max() <= 1e-10
    assert np.abs(z.std(axis=1) - 1.0).max() <= 1e-10


def test_manifest_header_rows(tmp_path):
    (tmp_path / "v.csv").write_text("f1,f2\n1,2\n3,4\n")
    (tmp_path / "m.json").write_text(json.dumps({
        "views": [{"path": "v.csv", "header": True}],
    }))
    ds = load_manifest(tmp_path / "m.json")
    assert ds.views[0].shape == (2, 2)
    assert np.array_equal(ds.views[0], [[1.0, 3.0], [2.0, 4.0]])


def test_manifest_errors(tmp_path):
    with pytest.raises(DataError):
        load_manifest(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(DataError):
        load_manifest(tmp_path / "bad.json")
    (tmp_path / "empty.json").write_text(json.dumps({"views": []}))
    with pytest.raises(DataError):
        load_manifest(tmp_path / "empty.json")
    (tmp_path / "noview.json").write_text(json.dumps({"views": [{"path": "gone.csv"}]}))
    with pytest.raises(DataError):
        load_manifest(tmp_path / "noview.json")
    (tmp_path / "text.csv").write_text("1,2\n3,abc\n")
    (tmp_path / "textm.json").write_text(json.dumps({"views": [{"path": "text.csv"}]}))
    with pytest.raises(DataError):
        load_manifest(tmp_path / "textm.json")


def test_report_json_round_trip(tmp_path):
    report = small_report()
    path = tmp_path / "report.json"
    write_report(report, path)
    back = read_report(path)
    assert np.array_equal(back.labels, report.labels)
    assert back.metrics == report.metrics
    assert back.trace == report.trace
    assert back.timings == report.timings
    assert back.config == report.config


def test_report_markdown_rows(tmp_path):
    report = small_report()
    path = tmp_path / "report.md"
    write_report(report, path, format="md")
    text = path.read_text()
    for key in ("NMI", "ARI", "ACC", "PUR"):
        assert sum(1 for line in text.splitlines() if line.startswith(f"| {key} |")) == 1
    assert "iterations: 2" in text


def test_report_markdown_without_labels():
    report = ClusterReport(
        labels=np.array([0, 1]), metrics=None, trace=[], timings={}, config={}
    )
    text = report_markdown(report)
    assert "no ground-truth labels" in text


def test_report_rejects_bad_metrics():
    with pytest.raises(DataError):
        ClusterReport(
            labels=np.array([0, 1]),
            metrics={"nmi": float("nan"), "ari": 0.0, "acc": 0.5, "pur": 0.5},
            trace=[], timings={}, config={},
        )
    with pytest.raises(DataError):
        ClusterReport(
            labels=np.array([0, 1]),
            metrics={"nmi": 1.5, "ari": 0.0, "acc": 0.5, "pur": 0.5},
            trace=[], timings={}, config={},
        )
    with pytest.raises(DataError):
        ClusterReport(
            labels=np.array([0, 1]),
            metrics={"nmi": 0.5},
            trace=[], timings={}, config={},
        )


def test_report_rejects_non_finite_trace(tmp_path):
    report = ClusterReport(
        labels=np.array([0, 1]),
        metrics=None,
        trace=[{"iter": 0, "lagrangian": float("inf"), "objective": 1.0, "primal_residual": 0.1}],
        timings={}, config={},
    )
    with pytest.raises(DataError):
        write_report(report, tmp_path / "r.json")


def test_report_rejects_unknown_format(tmp_path):
    with pytest.raises(DataError):
        write_report(small_report(), tmp_path / "r.xml", format="xml")


def test_report_from_dict_defaults():
    back = report_from_dict({"labels": [0, 1, 1]})
    assert back.metrics is None and back.trace == [] and back.config == {}
