"""Clustering quality metrics under the sum-of-absolute-differences distance.

Patterns are rows of a 2-D 0/1 array. A clustering is an integer array of
cluster indices with ``-1`` marking an unassigned pattern.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

UNASSIGNED = -1


def sad(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.abs(a - b).sum())


def centroid(members) -> np.ndarray:
    m = np.asarray(members, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] == 0:
        raise ValueError("centroid of an empty member list")
    return m.mean(axis=0)


def nearest_centroid(x, centroids) -> int:
    """Index of the closest centroid, lowest index on ties."""
    c = np.asarray(centroids, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] == 0:
        raise ValueError("no centroids")
    d = np.abs(c - np.asarray(x, dtype=np.float64)[None, :]).sum(axis=1)
    return int(np.argmin(d))


def sad_matrix(patterns, centroids) -> np.ndarray:
    """All pattern-to-centroid distances, shape (n, k).

    For 0/1 patterns this uses sad(x, c) = sum(c) + x . (1 - 2c), which
    turns the distance into a matrix product.
    """
    x = np.asarray(patterns)
    c = np.asarray(centroids, dtype=np.float64)
    if x.dtype == np.uint8 or x.dtype == bool:
        d = c.sum(axis=1)[None, :] + x.astype(np.float64) @ (1.0 - 2.0 * c).T
        # rationals with small denominators: snap away matmul round-off
        return np.round(d, 9)
    out = np.empty((x.shape[0], c.shape[0]))
    for k in range(c.shape[0]):
        out[:, k] = np.abs(x - c[k]).sum(axis=1)
    return out


def nearest_centroids(patterns, centroids) -> np.ndarray:
    return np.argmin(sad_matrix(patterns, centroids), axis=1)


def cluster_centroids(patterns, assign, q: int):
    """Member means per cluster; returns ``(centroids, present)``.

    Rows of empty clusters are left as NaN and flagged absent.
    """
    x = np.asarray(patterns, dtype=np.float64)
    assign = np.asarray(assign)
    cents = np.full((q, x.shape[1]), np.nan)
    present = np.zeros(q, dtype=bool)
    for k in range(q):
        members = x[assign == k]
        if members.shape[0]:
            cents[k] = members.mean(axis=0)
            present[k] = True
    return cents, present


def _assigned(assign):
    mask = np.asarray(assign) != UNASSIGNED
    if not mask.any():
        raise ValueError("no assigned patterns")
    return mask


def c_conv(patterns, assign, centroids, present=None) -> float:
    """Fraction of assigned patterns whose nearest centroid is their own."""
    assign = np.asarray(assign)
    mask = _assigned(assign)
    c = np.asarray(centroids, dtype=np.float64)
    if present is None:
        present = ~np.isnan(c).any(axis=1)
    idx = np.flatnonzero(present)
    near = idx[nearest_centroids(np.asarray(patterns)[mask], c[idx])]
    return float(np.mean(near == assign[mask]))


def avg_dist(patterns, assign, centroids) -> float:
    assign = np.asarray(assign)
    mask = _assigned(assign)
    x = np.asarray(patterns, dtype=np.float64)[mask]
    c = np.asarray(centroids, dtype=np.float64)[assign[mask]]
    return float(np.abs(x - c).sum() / mask.sum())


def w_conv(weights, w_max: int) -> float:
    w = np.asarray(weights, dtype=np.int64)
    return float((w * (w_max - w)).sum() / (w.size * w_max))


def purity(assign, labels) -> float:
    """Majority-label fraction. Unassigned patterns count only in |P|."""
    assign = np.asarray(assign)
    labels = np.asarray(labels)
    if assign.size == 0:
        return 0.0
    total = 0
    for k in np.unique(assign[assign != UNASSIGNED]):
        total += np.bincount(labels[assign == k]).max()
    return float(total / assign.size)


def coverage(assign) -> float:
    assign = np.asarray(assign)
    return float(np.mean(assign != UNASSIGNED)) if assign.size else 0.0


@dataclass
class MetricsReport:
    w_conv: float
    avg_dist: float
    c_conv: float
    purity: float
    coverage: float = 1.0
    searches: int = 0
    captures: int = 0
    backoffs: int = 0

    def as_dict(self):
        return asdict(self)


def clustering_report(patterns, assign, labels, q: int, weights=None,
                      w_max: int = 8) -> MetricsReport:
    """All clustering metrics, with centroids taken from the clusters' own members."""
    cents, present = cluster_centroids(patterns, assign, q)
    return MetricsReport(
        w_conv=w_conv(weights, w_max) if weights is not None else float("nan"),
        avg_dist=avg_dist(patterns, assign, cents),
        c_conv=c_conv(patterns, assign, cents, present),
        purity=purity(assign, labels),
        coverage=coverage(assign),
    )
