"""Spectral clustering on a learned representation.

The representation's symmetrized magnitude serves as the affinity; the
partition comes from the symmetric normalized Laplacian's bottom
eigenvectors, row-normalized, fed to seeded k-means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from sklearn.cluster import KMeans

from .graphs import AffinityGraph
from .linalg import as_matrix


class SpectralError(Exception):
    """Invalid clustering request (e.g. more clusters than instances)."""


@dataclass(frozen=True)
class SpectralConfig:
    """Partitioning controls.

    zero_affinity_diagonal removes self-similarity before the embedding;
    off by default (the representation's diagonal is kept as computed).
    """

    n_clusters: int
    kmeans_restarts: int = 20
    kmeans_max_iter: int = 300
    seed: int = 0
    zero_affinity_diagonal: bool = False

    def __post_init__(self):
        if self.n_clusters < 2:
            raise SpectralError(f"n_clusters must be at least 2, got {self.n_clusters}")
        if self.kmeans_restarts < 1:
            raise SpectralError(f"kmeans_restarts must be at least 1, got {self.kmeans_restarts}")
        if self.kmeans_max_iter < 1:
            raise SpectralError(f"kmeans_max_iter must be at least 1, got {self.kmeans_max_iter}")


def affinity_from_representation(c, zero_diagonal: bool = False) -> AffinityGraph:
    """Symmetrized magnitude of a square representation: (|C| + |C'|) / 2.

    The diagonal is kept as computed unless zero_diagonal is set.
    """
    c = as_matrix(c, "c")
    if c.shape[0] != c.shape[1]:
        raise SpectralError(f"representation must be square, got shape {c.shape}")
    w = (np.abs(c) + np.abs(c.T)) / 2.0
    if zero_diagonal:
        np.fill_diagonal(w, 0.0)
    return AffinityGraph(w, k=None)


def spectral_embedding(w: np.ndarray, n_clusters: int) -> np.ndarray:
    """Rows of the normalized-Laplacian embedding, unit-length where nonzero.

    L_sym = I - D^{-1/2} W D^{-1/2} with the convention D^{-1/2} = 0 for
    zero-degree vertices; the n_clusters eigenvectors of the smallest
    eigenvalues form the columns. Zero rows (isolated vertices) stay zero.
    """
    degrees = w.sum(axis=1)
    inv_sqrt = np.zeros_like(degrees)
    positive = degrees > 0
    inv_sqrt[positive] = 1.0 / np.sqrt(degrees[positive])
    normalized = w * inv_sqrt[:, None] * inv_sqrt[None, :]
    l_sym = np.eye(w.shape[0]) - normalized
    l_sym = (l_sym + l_sym.T) / 2.0
    _, vectors = scipy.linalg.eigh(l_sym, subset_by_index=(0, n_clusters - 1))
    norms = np.linalg.norm(vectors, axis=1)
    keep = norms > 1e-12
    vectors[keep] /= norms[keep, None]
    vectors[~keep] = 0.0
    return vectors


def spectral_partition(w: AffinityGraph | np.ndarray, cfg: SpectralConfig) -> np.ndarray:
    """Cluster labels in 0..n_clusters-1 from an affinity matrix.

    Deterministic given the seed: k-means++ restarts derive from it and the
    lowest-inertia run wins.
    """
    weights = w.weights if isinstance(w, AffinityGraph) else AffinityGraph(as_matrix(w)).weights
    n = weights.shape[0]
    if cfg.n_clusters > n:
        raise SpectralError(f"cannot split {n} instances into {cfg.n_clusters} clusters")
    if cfg.zero_affinity_diagonal:
        weights = weights.copy()
        np.fill_diagonal(weights, 0.0)
    embedding = spectral_embedding(weights, cfg.n_clusters)
    km = KMeans(
        n_clusters=cfg.n_clusters,
        init="k-means++",
        n_init=cfg.kmeans_restarts,
        max_iter=cfg.kmeans_max_iter,
        random_state=cfg.seed,
    )
    return km.fit_predict(embedding).astype(np.int64)
