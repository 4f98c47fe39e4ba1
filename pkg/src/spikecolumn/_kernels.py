"""Compiled training loop for binarized pattern streams.

Same arithmetic and draw order as ``stdp.train_step``; the numpy path is
the reference and the test suite checks the two agree bit for bit.
"""

from __future__ import annotations

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

NO_SPIKE = -1


def _train_binary(weights, bits, draws, theta, w_max, step, pre,
                  mu_search, mu_capture, mu_backoff, mu_min, fplus, fminus,
                  winners, wtimes, wpots, counts, ytimes):
    q, p = weights.shape
    hist = np.zeros(w_max + 1, dtype=np.int64)
    y = np.empty(q, dtype=np.int64)
    pot = np.empty(q, dtype=np.int64)
    for n in range(bits.shape[0]):
        x = bits[n]
        for j in range(q):
            hist[:] = 0
            for i in range(p):
                if x[i]:
                    hist[weights[j, i]] += 1
            y[j] = NO_SPIKE
            pot[j] = 0
            if step:
                v = 0
                for w in range(w_max + 1):
                    v += hist[w] * w
                if v >= theta:
                    y[j] = 0
                    pot[j] = v
            else:
                for t in range(w_max):
                    v = 0
                    for w in range(w_max + 1):
                        v += hist[w] * min(t + 1, w)
                    if v >= theta:
                        y[j] = t
                        pot[j] = v
                        break
            ytimes[n, j] = y[j]
        win = NO_SPIKE
        for j in range(q):
            if y[j] != NO_SPIKE and (win == NO_SPIKE or y[j] < y[win]):
                win = j
        winners[n] = win
        wtimes[n] = NO_SPIKE if win == NO_SPIKE else y[win]
        wpots[n] = 0 if win == NO_SPIKE else pot[win]

        d = draws[n]
        for j in range(q):
            if pre:
                out = y[j]
            else:
                out = y[j] if j == win else NO_SPIKE
            for i in range(p):
                k = 2 * (j * p + i)
                b1 = d[k]
                b2 = d[k + 1]
                w = weights[j, i]
                if out == NO_SPIKE:
                    if x[i] and b1 < mu_search and w < w_max:
                        weights[j, i] = w + 1
                        counts[n, 0] += 1
                elif x[i]:
                    # binarized input spikes at 0 <= out: capture
                    if b1 < mu_capture and b2 < max(fplus[w], mu_min) and w < w_max:
                        weights[j, i] = w + 1
                        counts[n, 1] += 1
                else:
                    if b1 < mu_backoff and b2 < max(fminus[w], mu_min) and w > 0:
                        weights[j, i] = w - 1
                        counts[n, 2] += 1


if numba is not None:
    train_binary = numba.njit(cache=True, nogil=True)(_train_binary)
else:  # pragma: no cover
    train_binary = None
