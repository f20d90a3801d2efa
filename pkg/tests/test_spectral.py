"""Tests for spectral clustering on learned affinities."""

import numpy as np
import pytest

from jsmc.graphs import AffinityGraph
from jsmc.metrics import ari, nmi
from jsmc.spectral import (
    SpectralConfig,
    SpectralError,
    affinity_from_representation,
    spectral_embedding,
    spectral_partition,
)


def block_affinity(sizes, rng, noise=0.0):
    n = sum(sizes)
    w = noise * rng.uniform(size=(n, n))
    start = 0
    for size in sizes:
        w[start : start + size, start : start + size] = 1.0
        start += size
    w = (w + w.T) / 2.0
    np.fill_diagonal(w, 0.0)
    return w


def test_spectral_config_validation():
    with pytest.raises(SpectralError):
        SpectralConfig(n_clusters=1)
    with pytest.raises(SpectralError):
        SpectralConfig(n_clusters=2, kmeans_restarts=0)
    with pytest.raises(SpectralError):
        SpectralConfig(n_clusters=2, kmeans_max_iter=0)
    cfg = SpectralConfig(n_clusters=3)
    assert cfg.kmeans_restarts == 20 and cfg.kmeans_max_iter == 300


def test_affinity_symmetric_nonnegative_input_is_identity():
    rng = np.random.default_rng(0)
    c = rng.uniform(size=(6, 6))
    c = (c + c.T) / 2.0
    g = affinity_from_representation(c)
    assert np.abs(g.weights - c).max() <= 1e-15


def test_affinity_mixed_signs():
    g = affinity_from_representation(np.array([[0.0, -2.0], [4.0, 0.0]]))
    assert np.allclose(g.weights, [[0.0, 3.0], [3.0, 0.0]])


def test_affinity_symmetry_and_nonnegativity():
    rng = np.random.default_rng(1)
    for _ in range(20):
        c = rng.standard_normal((7, 7))
        w = affinity_from_representation(c).weights
        assert np.abs(w - w.T).max() == 0.0
        assert w.min() >= 0.0


def test_affinity_keeps_diagonal_unless_asked():
    c = np.array([[0.5, 1.0], [1.0, 0.25]])
    assert np.allclose(np.diag(affinity_from_representation(c).weights), [0.5, 0.25])
    zeroed = affinity_from_representation(c, zero_diagonal=True)
    assert np.all(np.diag(zeroed.weights) == 0.0)


def test_affinity_rejects_rectangular():
    with pytest.raises(SpectralError):
        affinity_from_representation(np.zeros((2, 3)))


def test_spectral_embedding_rows_unit_or_zero():
    rng = np.random.default_rng(2)
    w = block_affinity([5, 5, 5], rng, noise=0.1)
    emb = spectral_embedding(w, 3)
    assert emb.shape == (15, 3)
    norms = np.linalg.norm(emb, axis=1)
    assert np.abs(norms - 1.0).max() <= 1e-10


def test_spectral_embedding_isolated_vertex_row_is_zero():
    w = np.zeros((4, 4))
    w[0, 1] = w[1, 0] = 1.0
    w[2, 3] = w[3, 2] = 1.0
    w2 = np.zeros((5, 5))
    w2[:4, :4] = w
    emb = spectral_embedding(w2, 2)
    assert np.all(emb[4] == 0.0)


def test_partition_separates_disconnected_cliques():
    rng = np.random.default_rng(3)
    w = block_affinity([6, 9], rng)
    labels = spectral_partition(AffinityGraph(w), SpectralConfig(n_clusters=2, seed=0))
    truth = np.array([0] * 6 + [1] * 9)
    assert ari(truth, labels) == 1.0


def test_partition_complete_graph_is_valid_labeling():
    w = np.ones((8, 8))
    np.fill_diagonal(w, 0.0)
    labels = spectral_partition(AffinityGraph(w), SpectralConfig(n_clusters=2, seed=0))
    assert labels.shape == (8,)
    assert set(labels).issubset({0, 1})


def test_partition_gram_affinity_of_blobs(standard_dataset):
    # affinity from the inner products of one clean view: blobs this far
    # apart should be near-perfectly recovered
    x = standard_dataset.views[0]
    gram = x.T @ x
    w = affinity_from_representation(gram / np.abs(gram).max())
    labels = spectral_partition(w, SpectralConfig(n_clusters=3, seed=0))
    assert nmi(standard_dataset.labels, labels) >= 0.95


def test_partition_label_range_and_length():
    rng = np.random.default_rng(4)
    w = block_affinity([4, 4, 4], rng, noise=0.3)
    labels = spectral_partition(AffinityGraph(w), SpectralConfig(n_clusters=3, seed=1))
    assert labels.shape == (12,)
    assert labels.dtype == np.int64
    assert set(labels).issubset(set(range(3)))


def test_partition_deterministic_under_seed():
    rng = np.random.default_rng(5)
    w = block_affinity([5, 5, 5], rng, noise=0.4)
    cfg = SpectralConfig(n_clusters=3, seed=123)
    a = spectral_partition(AffinityGraph(w), cfg)
    b = spectral_partition(AffinityGraph(w), cfg)
    assert np.array_equal(a, b)


def test_partition_permutation_equivariant():
    rng = np.random.default_rng(6)
    w = block_affinity([5, 6, 7], rng, noise=0.2)
    perm = rng.permutation(18)
    cfg = SpectralConfig(n_clusters=3, seed=0)
    labels = spectral_partition(AffinityGraph(w), cfg)
    labels_perm = spectral_partition(AffinityGraph(w[np.ix_(perm, perm)]), cfg)
    assert ari(labels[perm], labels_perm) == 1.0


def test_partition_rejects_too_many_clusters():
    w = np.ones((3, 3))
    np.fill_diagonal(w, 0.0)
    with pytest.raises(SpectralError):
        spectral_partition(AffinityGraph(w), SpectralConfig(n_clusters=4))


def test_partition_accepts_plain_arrays():
    rng = np.random.default_rng(7)
    w = block_affinity([4, 4], rng)
    labels = spectral_partition(w, SpectralConfig(n_clusters=2, seed=0))
    truth = np.array([0] * 4 + [1] * 4)
    assert ari(truth, labels) == 1.0


def test_partition_zero_diagonal_flag():
    rng = np.random.default_rng(8)
    w = block_affinity([5, 5], rng)
    w_diag = w.copy()
    np.fill_diagonal(w_diag, 3.0)
    cfg = SpectralConfig(n_clusters=2, seed=0, zero_affinity_diagonal=True)
    labels = spectral_partition(AffinityGraph(w_diag), cfg)
    truth = np.array([0] * 5 + [1] * 5)
    assert ari(truth, labels) == 1.0
