"""Probabilistic unit-step STDP with weight-dependent stabilizers.

Every synapse consumes exactly two 10-bit draws per training step, in
row-major synapse order (neuron, then input line), whatever case applies.
This keeps trajectories bit-identical between the scalar rule and the
vectorized trainer.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .column import Column, InferenceResult
from .rng import DENOM, Rng

POST = "post"
PRE = "pre"


@dataclass(frozen=True)
class StdpParams:
    mu_search: int
    mu_capture: int
    mu_backoff: int
    mu_min: int
    w_max: int = 8

    def __post_init__(self):
        for name in ("mu_search", "mu_capture", "mu_backoff", "mu_min"):
            v = getattr(self, name)
            if not 0 <= v <= DENOM:
                raise ValueError(f"{name}={v} outside [0, {DENOM}]")
        if self.w_max < 1:
            raise ValueError("w_max must be >= 1")


class UpdateKind(Enum):
    SEARCH = "search"
    CAPTURE = "capture"
    BACKOFF = "backoff"
    NONE = "none"


class Update(NamedTuple):
    kind: UpdateKind
    applied: bool


class UpdateCounts(NamedTuple):
    searches: int = 0
    captures: int = 0
    backoffs: int = 0

    @property
    def total(self) -> int:
        return self.searches + self.captures + self.backoffs

    def __add__(self, other):
        return UpdateCounts(*(a + b for a, b in zip(self, other)))


@lru_cache(maxsize=None)
def f_plus_table(w_max: int) -> np.ndarray:
    # round(1024 * wn * (2 - wn)) with wn = w / w_max, exact integer rounding
    w = np.arange(w_max + 1, dtype=np.int64)
    num = 2 * DENOM * w * (2 * w_max - w) + w_max * w_max
    t = num // (2 * w_max * w_max)
    t.setflags(write=False)
    return t


@lru_cache(maxsize=None)
def f_minus_table(w_max: int) -> np.ndarray:
    t = f_plus_table(w_max)[::-1].copy()
    t.setflags(write=False)
    return t


def _check_w(w, w_max):
    if not 0 <= w <= w_max:
        raise ValueError(f"weight {w} outside [0, {w_max}]")


def f_plus(w: int, w_max: int) -> int:
    _check_w(w, w_max)
    return int(f_plus_table(w_max)[w])


def f_minus(w: int, w_max: int) -> int:
    _check_w(w, w_max)
    return int(f_minus_table(w_max)[w])


def classify(x: float, z: float) -> UpdateKind:
    x_fin, z_fin = np.isfinite(x), np.isfinite(z)
    if x_fin and z_fin:
        return UpdateKind.CAPTURE if x <= z else UpdateKind.BACKOFF
    if x_fin:
        return UpdateKind.SEARCH
    if z_fin:
        return UpdateKind.BACKOFF
    return UpdateKind.NONE


def stdp_update(w: int, x: float, z: float, params: StdpParams,
                rng: Rng) -> tuple[int, Update]:
    """Update one synapse given its input spike time and neuron output time."""
    _check_w(w, params.w_max)
    b1, b2 = (int(d) for d in rng.draw(2))
    kind = classify(x, z)
    delta = 0
    if kind is UpdateKind.CAPTURE:
        if b1 < params.mu_capture and b2 < max(f_plus(w, params.w_max), params.mu_min):
            delta = 1
    elif kind is UpdateKind.BACKOFF:
        if b1 < params.mu_backoff and b2 < max(f_minus(w, params.w_max), params.mu_min):
            delta = -1
    elif kind is UpdateKind.SEARCH:
        if b1 < params.mu_search:
            delta = 1
    new_w = min(max(w + delta, 0), params.w_max)
    return new_w, Update(kind, new_w != w)


def apply_stdp(weights: np.ndarray, x: np.ndarray, z: np.ndarray,
               params: StdpParams, rng: Rng) -> UpdateCounts:
    """Vectorized rule over the whole crossbar; mutates ``weights`` in place."""
    q, p = weights.shape
    draws = rng.draw(2 * q * p).reshape(q, p, 2)
    b1, b2 = draws[..., 0], draws[..., 1]
    x_fin = np.isfinite(x)
    z_fin = np.isfinite(z)
    w_max = params.w_max
    searches = captures = backoffs = 0

    quiet = np.flatnonzero(~z_fin)
    if quiet.size and params.mu_search:
        wq = weights[quiet]
        inc = x_fin & (b1[quiet] < params.mu_search) & (wq < w_max)
        weights[quiet] = wq + inc
        searches = int(inc.sum())

    for j in np.flatnonzero(z_fin):
        w = weights[j]
        capture = x_fin & (x <= z[j])
        inc = capture & (b1[j] < params.mu_capture) & (
            b2[j] < np.maximum(f_plus_table(w_max)[w], params.mu_min))
        dec = ~capture & (b1[j] < params.mu_backoff) & (
            b2[j] < np.maximum(f_minus_table(w_max)[w], params.mu_min))
        # clamping: an increment at w_max or decrement at 0 is not applied
        inc &= w < w_max
        dec &= w > 0
        weights[j] = w + inc - dec
        captures += int(inc.sum())
        backoffs += int(dec.sum())
    return UpdateCounts(searches, captures, backoffs)


def train_step(col: Column, x, params: StdpParams, rng: Rng,
               signal: str = POST) -> tuple[InferenceResult, UpdateCounts]:
    """Infer on ``x`` then apply STDP to every synapse of the column.

    ``signal`` picks the output spike the synapses learn against: the
    post-inhibition ``z`` (default) or the raw neuron outputs ``y``.
    """
    if params.w_max != col.w_max:
        raise ValueError("StdpParams.w_max does not match the column")
    x = np.asarray(x, dtype=np.float64)
    res = col.infer(x)
    if signal == POST:
        out = res.z
    elif signal == PRE:
        out = res.y
    else:
        raise ValueError(f"unknown STDP signal {signal!r}")
    counts = apply_stdp(col.weights, x, out, params, rng)
    return res, counts
