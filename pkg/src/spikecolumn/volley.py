"""Spike volleys and input encoders.

A volley is a 1-D float array with one entry per input line. Finite entries
are non-negative integer spike times; ``INF`` (IEEE infinity) marks a line
that carries no spike. Infinity is used instead of a large integer so that
time arithmetic (``t - x``) can never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf


def as_volley(times) -> np.ndarray:
    """Coerce a sequence of spike times to a volley array, validating it."""
    v = np.asarray(times, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"volley must be 1-D, got shape {v.shape}")
    finite = np.isfinite(v)
    if np.any(np.isnan(v)) or np.any(v[~finite] < 0):
        raise ValueError("volley entries must be non-negative times or INF")
    if np.any(v[finite] < 0) or np.any(v[finite] != np.floor(v[finite])):
        raise ValueError("finite spike times must be non-negative integers")
    return v


def is_null(v: np.ndarray) -> bool:
    return not np.isfinite(v).any()


def binarize(v) -> np.ndarray:
    """Flatten all temporal information: every spike moves to time 0."""
    v = np.asarray(v, dtype=np.float64)
    return np.where(np.isfinite(v), 0.0, INF)


def min_time(v) -> float:
    """Earliest spike in the volley, INF for the null volley."""
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        return INF
    return float(v.min())


@dataclass(frozen=True)
class BinaryImage:
    pixels: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8).reshape(-1)
        if px.size != self.width * self.height:
            raise ValueError(
                f"pixel count {px.size} != {self.width}x{self.height}")
        if np.any(px > 1):
            raise ValueError("pixels must be 0 or 1")
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_array(cls, arr) -> "BinaryImage":
        arr = np.asarray(arr)
        return cls(arr.reshape(-1), width=arr.shape[1], height=arr.shape[0])

    def to_array(self) -> np.ndarray:
        return self.pixels.reshape(self.height, self.width)


def posneg_bits(pixels) -> np.ndarray:
    """PosNeg expansion on raw bits; works row-wise on a 2-D batch too."""
    px = np.asarray(pixels, dtype=np.uint8)
    return np.concatenate([px, 1 - px], axis=-1)


def bits_to_volley(bits) -> np.ndarray:
    """Lines with bit 1 spike at time 0, the rest are silent."""
    bits = np.asarray(bits)
    return np.where(bits != 0, 0.0, INF)


def volley_to_bits(v) -> np.ndarray:
    return np.isfinite(np.asarray(v, dtype=np.float64)).astype(np.uint8)


def posneg_encode(img: BinaryImage) -> np.ndarray:
    """Encode an image and its negative as one 2n-line volley.

    Lines ``0..n-1`` carry the positive image, lines ``n..2n-1`` the
    complement, so exactly ``n`` lines spike.
    """
    return bits_to_volley(posneg_bits(img.pixels))
