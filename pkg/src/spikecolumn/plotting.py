"""Figures written next to the CSV output. Uses the Agg backend only."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure

STYLE = {"figsize": (6.4, 4.0), "dpi": 120}


def _save(fig: Figure, path) -> str:
    fig.tight_layout()
    fig.savefig(path)
    return str(path)


def plot_updates(buckets, path, bucket: int = 1000, transition=None) -> str:
    """Applied STDP updates per bucket of patterns, one line per kind."""
    b = np.asarray(buckets)
    fig = Figure(**STYLE)
    ax = fig.add_subplot()
    for col, name in zip((1, 2, 3), ("searches", "captures", "backoffs")):
        ax.plot(b[:, 0], b[:, col] / bucket, label=name)
    if transition is not None:
        ax.axvline(transition, color="0.5", ls=":", lw=1)
    ax.set_xlabel("input pattern")
    ax.set_ylabel("updates per pattern")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_sweep(rows, path) -> str:
    """Purity per configuration, sorted best first, one curve per warm-up."""
    fig = Figure(**STYLE)
    ax = fig.add_subplot()
    warmups = sorted({r["warmup"] for r in rows})
    for w in warmups:
        pur = [r["purity"] for r in rows if r["warmup"] == w]
        ax.plot(np.arange(len(pur)), pur, marker=".", label=f"{w // 1000}K+10K")
    ax.set_xlabel("configuration (sorted)")
    ax.set_ylabel("purity")
    ax.set_ylim(0, 1)
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_temporal(rows, path) -> str:
    """Cumulative coverage and purity against output spike time."""
    t = [r[0] for r in rows]
    fig = Figure(**STYLE)
    ax = fig.add_subplot()
    ax.plot(t, [r[2] for r in rows], marker="o", label="cumulative coverage")
    ax.plot(t, [r[3] for r in rows], marker="s", label="cumulative purity")
    ax2 = ax.twinx()
    ax2.bar(t, [r[1] for r in rows], color="0.85", zorder=0)
    ax2.set_ylabel("patterns")
    ax.set_zorder(ax2.get_zorder() + 1)
    ax.patch.set_visible(False)
    ax.set_xlabel("output spike time")
    ax.set_ylim(0, 1.02)
    ax.legend(frameon=False, loc="lower right")
    return _save(fig, path)


def plot_weights(weights, rf: int, w_max: int, path) -> str:
    """Each neuron's positive-line weights as an rf x rf image."""
    w = np.asarray(weights)
    q = w.shape[0]
    fig = Figure(figsize=(1.3 * q, 1.6), dpi=120)
    for j in range(q):
        ax = fig.add_subplot(1, q, j + 1)
        ax.imshow(w[j, :rf * rf].reshape(rf, rf), cmap="gray_r", vmin=0, vmax=w_max)
        ax.set_title(str(j), fontsize=8)
        ax.set_xticks([])
        ax.set_yticks([])
    return _save(fig, path)


def plot_kmeans(purities, path) -> str:
    fig = Figure(**STYLE)
    ax = fig.add_subplot()
    ax.hist(purities, bins=20, range=(0, 1), color="0.4")
    ax.set_xlabel("purity")
    ax.set_ylabel("seeds")
    return _save(fig, path)
