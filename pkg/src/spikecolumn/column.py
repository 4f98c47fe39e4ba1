"""The p x q synaptic crossbar with 1-WTA inhibition."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .neuron import RAMP, RESPONSES, first_crossing, potential_trace
from .volley import INF


@dataclass
class InferenceResult:
    y: np.ndarray
    z: np.ndarray
    winner: Optional[int]
    winner_potential: int
    potentials: np.ndarray = field(repr=False, default=None)

    @property
    def spike(self) -> float:
        return INF if self.winner is None else float(self.z[self.winner])


class Column:
    """Crossbar of ``q`` neurons each fed by ``p`` input lines.

    ``weights[j, i]`` is the synapse from input line ``i`` to neuron ``j``.
    """

    def __init__(self, p: int, q: int, theta: int, w_max: int = 8,
                 weights=None, response: str = RAMP):
        if p < 1 or q < 1:
            raise ValueError("p and q must be positive")
        if theta < 1:
            raise ValueError("theta must be >= 1")
        if w_max < 1:
            raise ValueError("w_max must be >= 1")
        if response not in RESPONSES:
            raise ValueError(f"unknown response kind {response!r}")
        self.p, self.q = p, q
        self.theta = theta
        self.w_max = w_max
        self.response = response
        if weights is None:
            weights = np.zeros((q, p), dtype=np.int64)
        w = np.array(weights, dtype=np.int64)
        if w.shape != (q, p):
            raise ValueError(f"weights shape {w.shape} != {(q, p)}")
        if w.min() < 0 or w.max() > w_max:
            raise ValueError(f"weights must lie in [0, {w_max}]")
        self.weights = w

    def copy(self) -> "Column":
        return Column(self.p, self.q, self.theta, self.w_max,
                      self.weights.copy(), self.response)

    def _check(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.p,):
            raise ValueError(f"volley length {x.size} != p={self.p}")
        return x

    def potentials(self, x):
        x = self._check(x)
        t0, v = potential_trace(x, self.weights, self.w_max, self.response)
        return first_crossing(t0, v, self.theta)

    def evaluate(self, x) -> np.ndarray:
        """y = E(x, W): the pre-inhibition spike time of every neuron."""
        return self.potentials(x)[0]

    def infer(self, x) -> InferenceResult:
        y, pots = self.potentials(x)
        z = wta(y)
        winner = winner_index(y)
        return InferenceResult(y, z, winner,
                               0 if winner is None else int(pots[winner]), pots)

    def save(self, path) -> None:
        save_weights(self, path)


def winner_index(y) -> Optional[int]:
    y = np.asarray(y, dtype=np.float64)
    if y.size == 0 or not np.isfinite(y).any():
        return None
    # argmin returns the first occurrence, i.e. the lowest index on ties
    return int(np.argmin(y))


def wta(y) -> np.ndarray:
    """1-WTA: keep only the earliest spike, lowest index on ties."""
    y = np.asarray(y, dtype=np.float64)
    z = np.full_like(y, INF)
    k = winner_index(y)
    if k is not None:
        z[k] = y[k]
    return z


def evaluate(col: Column, x) -> np.ndarray:
    return col.evaluate(x)


def infer(col: Column, x) -> InferenceResult:
    return col.infer(x)


def save_weights(col: Column, path) -> None:
    """Plain-text snapshot: header ``p q w_max theta`` then q rows of p ints."""
    lines = [f"{col.p} {col.q} {col.w_max} {col.theta}"]
    lines += [" ".join(str(int(w)) for w in row) for row in col.weights]
    Path(path).write_text("\n".join(lines) + "\n")


def load_weights(path, response: str = RAMP) -> Column:
    rows = Path(path).read_text().split("\n")
    rows = [r for r in rows if r.strip()]
    if not rows:
        raise ValueError(f"{path}: empty weight snapshot")
    try:
        p, q, w_max, theta = (int(s) for s in rows[0].split())
    except ValueError:
        raise ValueError(f"{path}: bad header {rows[0]!r}") from None
    if len(rows) - 1 != q:
        raise ValueError(f"{path}: expected {q} weight rows, found {len(rows) - 1}")
    data = [r.split() for r in rows[1:]]
    if any(len(r) != p for r in data):
        raise ValueError(f"{path}: weight rows must have {p} entries")
    w = np.array(data, dtype=np.int64)
    return Column(p, q, theta, w_max, w, response)
