"""K nearest neighbor affinity graphs and their Laplacians.

Data matrices are d x n with instances as columns, matching the optimizer's
convention. Graphs are symmetric nonnegative n x n weight matrices with zero
diagonal; the Laplacian is the unnormalized D - W.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix


class GraphError(Exception):
    """Invalid graph construction input or malformed weight matrix."""


@dataclass(frozen=True)
class AffinityGraph:
    """Symmetric nonnegative affinity matrix.

    K-NN constructions produce a zero diagonal and record the neighborhood
    size in ``k``; affinities derived from a learned representation may
    carry self-similarity on the diagonal and leave ``k`` as None.
    """

    weights: np.ndarray
    k: int | None = None

    def __post_init__(self):
        w = as_matrix(self.weights, "weights")
        if w.shape[0] != w.shape[1]:
            raise GraphError(f"weights must be square, got shape {w.shape}")
        if (w < 0).any():
            raise GraphError("weights must be nonnegative")
        scale = max(1.0, float(w.max(initial=0.0)))
        if np.abs(w - w.T).max(initial=0.0) > 1e-12 * scale:
            raise GraphError("weights must be symmetric")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def degrees(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    def laplacian(self) -> np.ndarray:
        """Unnormalized graph Laplacian D - W (symmetric PSD)."""
        return np.diag(self.degrees()) - self.weights


def pairwise_sq_dists(x: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between columns of a d x n matrix.

    Clamped at zero: the expansion ||a||^2 + ||b||^2 - 2 a.b can go slightly
    negative in floating point for near-identical columns.
    """
    sq = np.einsum("ij,ij->j", x, x)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x.T @ x)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def knn_graph(x, k: int = 5, weights: str = "binary", bandwidth: float | None = None) -> AffinityGraph:
    """Build a symmetrized K-NN affinity graph over the columns of ``x``.

    Each instance selects its ``k`` nearest other instances by Euclidean
    distance; points tied with the k-th smallest distance are all included,
    so the selection is a function of the geometry alone and permuting
    instances permutes the graph. The directed 0/1 selection A is then
    symmetrized as (A + A') / 2, giving entries in {0, 1/2, 1}.

    With ``weights="gaussian"`` selected edges carry exp(-d^2 / (2 h^2))
    before symmetrization, where h is ``bandwidth`` or, by default, the
    median of the selected neighbor distances.
    """
    x = as_matrix(x, "x")
    n = x.shape[1]
    if not 1 <= k <= n - 1:
        raise GraphError(f"k must be in [1, {n - 1}] for {n} instances, got {k}")
    if weights not in ("binary", "gaussian"):
        raise GraphError(f"weights must be 'binary' or 'gaussian', got {weights!r}")

    d2 = pairwise_sq_dists(x)
    np.fill_diagonal(d2, np.inf)
    # Distance to each point's k-th nearest neighbor; inclusive boundary so
    # ties at the cutoff all enter the neighborhood.
    kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
    selected = d2 <= kth[:, None]

    if weights == "binary":
        a = selected.astype(float)
    else:
        if bandwidth is None:
            h2 = float(np.median(d2[selected]))
        else:
            if bandwidth <= 0:
                raise GraphError(f"bandwidth must be positive, got {bandwidth}")
            h2 = bandwidth * bandwidth
        if h2 <= 0:
            h2 = 1.0
        a = np.where(selected, np.exp(-d2 / (2.0 * h2)), 0.0)

    w = (a + a.T) / 2.0
    np.fill_diagonal(w, 0.0)
    return AffinityGraph(w, k=k)


def average_knn_graph(views, k: int = 5, weights: str = "binary", bandwidth: float | None = None) -> AffinityGraph:
    """Per-view K-NN graphs averaged entrywise into one affinity matrix.

    Each view's graph is symmetrized before averaging, so the result is the
    mean of valid affinity matrices and is itself one.
    """
    views = list(views)
    if not views:
        raise GraphError("need at least one view")
    graphs = [knn_graph(x, k=k, weights=weights, bandwidth=bandwidth) for x in views]
    n = graphs[0].n
    for g in graphs[1:]:
        if g.n != n:
            raise GraphError(f"views disagree on instance count: {g.n} != {n}")
    w = np.mean([g.weights for g in graphs], axis=0)
    return AffinityGraph(w, k=None)


def laplacian(graph: AffinityGraph) -> np.ndarray:
    """Unnormalized Laplacian of an affinity graph."""
    return graph.laplacian()
