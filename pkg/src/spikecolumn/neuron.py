"""SRM0 excitatory neuron with ramp no-leak response functions.

All quantities are small integers. Potentials are bounded by ``p * w_max``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .volley import INF

RAMP = "ramp"
STEP = "step"
RESPONSES = (RAMP, STEP)


class NeuronResult(NamedTuple):
    spike: float
    potential_at_spike: int


def response(w: int, t: int, w_max: int = 8, kind: str = RAMP) -> int:
    """Response of a synapse with weight ``w``, ``t`` time units after its spike."""
    if not 0 <= w <= w_max:
        raise ValueError(f"weight {w} outside [0, {w_max}]")
    if t < 0:
        return 0
    if kind == STEP:
        return w
    return t + 1 if t < w else w


def _check_kind(kind):
    if kind not in RESPONSES:
        raise ValueError(f"unknown response kind {kind!r}")


def body_potential(x, weights, t: int, kind: str = RAMP) -> int:
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(weights, dtype=np.int64)
    if x.shape != w.shape:
        raise ValueError(f"volley length {x.size} != weight count {w.size}")
    _check_kind(kind)
    finite = np.isfinite(x)
    if not finite.any():
        return 0
    rel = t - x[finite].astype(np.int64)
    wf = w[finite]
    if kind == STEP:
        return int(np.where(rel >= 0, wf, 0).sum())
    return int(np.minimum(np.maximum(rel + 1, 0), wf).sum())


def potential_trace(x, weights, w_max: int, kind: str = RAMP):
    """Body potentials over the whole time window where they can change.

    ``weights`` may be a single row (p,) or a matrix (q, p). Returns
    ``(t0, v)`` where ``v[..., k]`` is the potential at time ``t0 + k``; the
    last column is the saturated value.
    """
    _check_kind(kind)
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(weights, dtype=np.int64)
    if w.shape[-1] != x.size:
        raise ValueError(f"volley length {x.size} != weight count {w.shape[-1]}")
    finite = np.isfinite(x)
    if not finite.any():
        return 0, np.zeros(w.shape[:-1] + (1,), dtype=np.int64)
    xf = x[finite].astype(np.int64)
    wf = w[..., finite]
    t0 = int(xf.min())
    t1 = int(xf.max())
    # potential is constant from max(x) + w_max onwards
    horizon = 1 if kind == STEP else w_max
    if t0 == t1:
        # all spikes coincide (binarized input): no per-line shifts needed
        if kind == STEP:
            return t0, wf.sum(axis=-1)[..., None]
        ramp = np.arange(1, horizon + 1)
        return t0, np.minimum(wf[..., None], ramp).sum(axis=-2)
    ts = np.arange(t0, t1 + horizon + 1)
    rel = ts[:, None] - xf[None, :]
    if kind == STEP:
        contrib = np.where(rel >= 0, wf[..., None, :], 0)
    else:
        contrib = np.minimum(np.maximum(rel + 1, 0), wf[..., None, :])
    return t0, contrib.sum(axis=-1)


def first_crossing(t0: int, v: np.ndarray, theta: int):
    """Spike times and potentials from a (q, T) potential trace."""
    above = v >= theta
    hit = above.any(axis=-1)
    k = above.argmax(axis=-1)
    times = np.where(hit, t0 + k, INF)
    pots = np.where(hit, np.take_along_axis(v, k[..., None], axis=-1)[..., 0], 0)
    return times, pots


def spike_time(x, weights, theta: int, w_max: int = 8, kind: str = RAMP) -> NeuronResult:
    """Smallest t at which the body potential reaches ``theta``."""
    if theta < 1:
        raise ValueError("theta must be >= 1")
    t0, v = potential_trace(x, weights, w_max, kind)
    times, pots = first_crossing(t0, v, theta)
    return NeuronResult(float(times), int(pots))


def extrapolate_spike_time(z_i: int, v: int, theta_f: int) -> int:
    """Rescale a spike time at the implemented threshold to a functional one."""
    if v <= 0:
        raise ValueError("potential at spike must be positive")
    if not math.isfinite(z_i):
        raise ValueError("spike time must be finite")
    z_i = int(z_i)
    return -(-(z_i * theta_f) // v)


def ideal_spike_time(m: int, theta: int) -> int:
    """Spike time of m unbounded unit ramps all starting at 0."""
    if m <= 0:
        raise ValueError("match count must be positive")
    return -(-theta // m) - 1
