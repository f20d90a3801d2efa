"""External clustering quality metrics.

All four scores are functions of the contingency table between the true and
predicted labelings; label values themselves are arbitrary (they are mapped
to dense indices first), only the induced partitions matter.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

NMI_NORMALIZATIONS = ("sqrt", "min", "max", "arithmetic")


def _check_labels(labels_true, labels_pred) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(labels_true)
    p = np.asarray(labels_pred)
    if t.ndim != 1 or p.ndim != 1:
        raise ValueError("labels must be 1-D arrays")
    if t.shape != p.shape:
        raise ValueError(f"label arrays disagree on length: {t.shape} vs {p.shape}")
    if t.size == 0:
        raise ValueError("labels must be non-empty")
    return t, p


def contingency_table(labels_true, labels_pred) -> np.ndarray:
    """Counts n_ij of instances with true class i and predicted cluster j."""
    t, p = _check_labels(labels_true, labels_pred)
    _, ti = np.unique(t, return_inverse=True)
    _, pi = np.unique(p, return_inverse=True)
    table = np.zeros((ti.max() + 1, pi.max() + 1), dtype=np.int64)
    np.add.at(table, (ti, pi), 1)
    return table


def _entropy(counts: np.ndarray) -> float:
    """Entropy in nats of a distribution given by nonnegative counts."""
    n = counts.sum()
    pk = counts[counts > 0] / n
    return float(-(pk * np.log(pk)).sum())


def mutual_information(labels_true, labels_pred) -> float:
    """Mutual information in nats between the two labelings."""
    table = contingency_table(labels_true, labels_pred)
    n = table.sum()
    row = table.sum(axis=1)
    col = table.sum(axis=0)
    nz = table > 0
    nij = table[nz].astype(float)
    outer = np.outer(row, col)[nz].astype(float)
    mi = (nij / n * (np.log(nij * n) - np.log(outer))).sum()
    return float(max(mi, 0.0))


def nmi(labels_true, labels_pred, normalization: str = "sqrt") -> float:
    """Normalized mutual information.

    The default normalizes by sqrt(H(T) H(P)); "min", "max" and
    "arithmetic" use the corresponding combination of the two entropies.
    When both partitions are single-cluster the 0/0 form is defined as 0.
    """
    if normalization not in NMI_NORMALIZATIONS:
        raise ValueError(
            f"normalization must be one of {NMI_NORMALIZATIONS}, got {normalization!r}"
        )
    table = contingency_table(labels_true, labels_pred)
    ht = _entropy(table.sum(axis=1))
    hp = _entropy(table.sum(axis=0))
    mi = mutual_information(labels_true, labels_pred)
    if normalization == "sqrt":
        denom = np.sqrt(ht * hp)
    elif normalization == "min":
        denom = min(ht, hp)
    elif normalization == "max":
        denom = max(ht, hp)
    else:
        denom = (ht + hp) / 2.0
    if denom <= 0.0:
        return 0.0
    return float(min(mi / denom, 1.0))


def ari(labels_true, labels_pred) -> float:
    """Adjusted Rand index via pair counting on the contingency table.

    Degenerate cases where the expected index equals the maximum index
    (both partitions trivial) score 1.0 by convention.
    """
    table = contingency_table(labels_true, labels_pred)
    n = table.sum()

    def comb2(x):
        x = x.astype(float)
        return x * (x - 1.0) / 2.0

    sum_ij = comb2(table).sum()
    sum_i = comb2(table.sum(axis=1)).sum()
    sum_j = comb2(table.sum(axis=0)).sum()
    total = n * (n - 1.0) / 2.0
    expected = sum_i * sum_j / total if total > 0 else 0.0
    max_index = (sum_i + sum_j) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))


def acc(labels_true, labels_pred) -> float:
    """Clustering accuracy: best one-to-one cluster-to-class matching.

    The contingency table is zero-padded to square so the assignment is a
    permutation even when the partitions have different cluster counts;
    the Hungarian algorithm maximizes the matched count.
    """
    table = contingency_table(labels_true, labels_pred)
    n = table.sum()
    size = max(table.shape)
    padded = np.zeros((size, size), dtype=np.int64)
    padded[: table.shape[0], : table.shape[1]] = table
    rows, cols = linear_sum_assignment(padded, maximize=True)
    return float(padded[rows, cols].sum() / n)


def purity(labels_true, labels_pred) -> float:
    """Fraction of instances assigned to their cluster's majority class.

    Each predicted cluster counts its most common true class; unlike acc
    several clusters may claim the same class, so purity >= acc always.
    """
    table = contingency_table(labels_true, labels_pred)
    n = table.sum()
    return float(table.max(axis=0).sum() / n)


def score_all(labels_true, labels_pred) -> dict[str, float]:
    """The four external metrics keyed as in cluster reports."""
    return {
        "nmi": nmi(labels_true, labels_pred),
        "ari": ari(labels_true, labels_pred),
        "acc": acc(labels_true, labels_pred),
        "pur": purity(labels_true, labels_pred),
    }
