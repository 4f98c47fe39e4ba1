"""Offline k-means under sad distance, the reference point for the column."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .metrics import MetricsReport, clustering_report, nearest_centroids


@dataclass
class KMeansModel:
    centroids: np.ndarray
    epochs_run: int
    final_c_conv: float
    converged: bool = True
    history: list = field(default_factory=list)


def _means(x, assign, k, rng):
    cents = np.empty((k, x.shape[1]))
    counts = np.bincount(assign, minlength=k)
    onehot = np.zeros((x.shape[0], k))
    onehot[np.arange(x.shape[0]), assign] = 1.0
    sums = onehot.T @ x
    reseeded = False
    for j in range(k):
        if counts[j]:
            cents[j] = sums[j] / counts[j]
        else:
            cents[j] = x[rng.integers(x.shape[0])]
            reseeded = True
    return cents, reseeded


def kmeans_fit(patterns, k: int, rng: np.random.Generator, max_epochs: int = 100,
               target: float = 0.99) -> KMeansModel:
    """Lloyd iterations until at least ``target`` of the assignments are stable.

    Each epoch assigns every pattern to its nearest centroid and recomputes
    the centroids. The epoch's c_conv is the fraction of patterns whose
    nearest new centroid is the cluster they were just assigned to.
    """
    x = np.asarray(patterns)
    n = x.shape[0]
    if k <= 0:
        raise ValueError("k must be positive")
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} patterns")
    xf = x.astype(np.float64)
    cents = xf[rng.choice(n, size=k, replace=False)]
    assign = nearest_centroids(x, cents)
    history = []
    conv = 0.0
    for epoch in range(1, max_epochs + 1):
        cents, reseeded = _means(xf, assign, k, rng)
        nxt = nearest_centroids(x, cents)
        conv = float(np.mean(nxt == assign))
        history.append({"epoch": epoch, "c_conv": conv, "reseeded": reseeded,
                        "within": within_sad(xf, nxt, cents)})
        assign = nxt
        if conv >= target and not reseeded:
            return KMeansModel(cents, epoch, conv, True, history)
    return KMeansModel(cents, max_epochs, conv, False, history)


def within_sad(x, assign, cents) -> float:
    return float(np.abs(np.asarray(x, dtype=np.float64) - cents[assign]).sum())


def kmeans_assign(model: KMeansModel, patterns) -> np.ndarray:
    return nearest_centroids(patterns, model.centroids)


def kmeans_evaluate(model: KMeansModel, patterns, labels) -> MetricsReport:
    """Partition held-out patterns with the fitted centroids and score them."""
    assign = kmeans_assign(model, patterns)
    k = model.centroids.shape[0]
    return clustering_report(patterns, assign, labels, k)
