"""Deterministic sources of 10-bit uniform draws for Bernoulli variables.

Each draw is an integer in ``[0, 1024)``; a Bernoulli variable with
numerator ``n`` is true iff the draw is below ``n``.
"""

from __future__ import annotations

import numpy as np

DENOM = 1024
DRAW_BITS = 10

STANDARD = "standard"
LFSR = "lfsr"

# x^16 + x^15 + x^13 + x^4 + 1, maximal length
_LFSR_TAPS = (16, 15, 13, 4)
_LFSR_PERIOD = (1 << 16) - 1
_lfsr_table = None


def _lfsr_windows() -> np.ndarray:
    global _lfsr_table
    if _lfsr_table is None:
        state = 0xACE1
        bits = np.empty(_LFSR_PERIOD, dtype=np.int64)
        for k in range(_LFSR_PERIOD):
            b = 0
            for tap in _LFSR_TAPS:
                b ^= state >> (16 - tap)
            b &= 1
            state = (state >> 1) | (b << 15)
            bits[k] = b
        ext = np.concatenate([bits, bits[:DRAW_BITS - 1]])
        table = np.zeros(_LFSR_PERIOD, dtype=np.int64)
        for j in range(DRAW_BITS):
            table = (table << 1) | ext[j:j + _LFSR_PERIOD]
        _lfsr_table = table
    return _lfsr_table


class Rng:
    """Seedable stream of 10-bit draws.

    ``standard`` takes the top 10 bits of successive PCG64 outputs, so the
    sequence does not depend on how draws are batched. ``lfsr`` models a
    16-bit hardware LFSR shifting out one bit per draw, the draw being the
    sliding window of the last 10 bits.
    """

    def __init__(self, seed: int = 0, mode: str = STANDARD):
        if mode not in (STANDARD, LFSR):
            raise ValueError(f"unknown rng mode {mode!r}")
        self.seed = seed
        self.mode = mode
        if mode == STANDARD:
            self._bitgen = np.random.PCG64(seed)
        else:
            self._pos = seed % _LFSR_PERIOD

    def draw(self, n: int) -> np.ndarray:
        if self.mode == STANDARD:
            raw = self._bitgen.random_raw(n)
            return (raw >> np.uint64(64 - DRAW_BITS)).astype(np.int64)
        idx = (self._pos + np.arange(n)) % _LFSR_PERIOD
        self._pos = (self._pos + n) % _LFSR_PERIOD
        return _lfsr_windows()[idx]

    def draw_one(self) -> int:
        return int(self.draw(1)[0])


def bernoulli(numerator: int, rng: Rng) -> bool:
    """True with probability numerator/1024; consumes one draw."""
    if not 0 <= numerator <= DENOM:
        raise ValueError(f"numerator {numerator} outside [0, {DENOM}]")
    return rng.draw_one() < numerator
