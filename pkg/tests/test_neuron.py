import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spikecolumn.neuron import (RAMP, STEP, body_potential, extrapolate_spike_time,
                                ideal_spike_time, potential_trace, response,
                                spike_time)
from spikecolumn.volley import INF


def rho_table(w, t):
    # independent restatement of the piecewise ramp no-leak response
    if t < 0:
        return 0
    return min(t + 1, w)


def test_response_exhaustive_table():
    for w, t in itertools.product(range(9), range(-2, 13)):
        assert response(w, t) == rho_table(w, t), (w, t)


def test_response_examples():
    assert response(8, -1) == 0
    assert response(8, 3) == 4
    assert response(3, 10) == 3


def test_step_response():
    assert [response(5, t, kind=STEP) for t in (-1, 0, 3, 9)] == [0, 5, 5, 5]


def test_response_rejects_weight_out_of_range():
    with pytest.raises(ValueError):
        response(9, 0)
    with pytest.raises(ValueError):
        response(-1, 0)


def test_body_potential_examples():
    assert body_potential([0, 0, INF, 0], [8, 8, 8, 8], 2) == 9
    assert body_potential([INF, INF], [8, 8], 5) == 0
    assert body_potential([0, 2], [4, 4], 3) == 6
    with pytest.raises(ValueError):
        body_potential([0, 0], [1], 0)


def brute_spike(x, w, theta, kind=RAMP):
    fin = [xi for xi in x if xi != INF]
    if not fin:
        return INF, 0
    for t in range(int(min(fin)), int(max(fin)) + 9 + 1):
        v = sum(response(wi, t - int(xi), kind=kind) for xi, wi in zip(x, w) if xi != INF)
        if v >= theta:
            return t, v
    return INF, 0


def test_spike_time_examples():
    assert spike_time([0, 0, 0], [8, 8, 8], 8) == (2, 9)
    assert spike_time([0], [8], 8) == (7, 8)
    assert spike_time([0, 0, 0], [8, 8, 8], 25) == (INF, 0)


vol = st.lists(st.tuples(st.one_of(st.integers(0, 6).map(float), st.just(INF)),
                         st.integers(0, 8)), min_size=1, max_size=16)


@given(vol, st.integers(1, 80), st.sampled_from([RAMP, STEP]))
def test_spike_time_matches_brute_force(pairs, theta, kind):
    x = [a for a, _ in pairs]
    w = [b for _, b in pairs]
    assert tuple(spike_time(x, w, theta, kind=kind)) == brute_spike(x, w, theta, kind)


@given(vol)
def test_potential_monotone_and_saturates(pairs):
    x = [a for a, _ in pairs]
    w = [b for _, b in pairs]
    fin = [a for a in x if a != INF]
    top = int(max(fin)) + 8 if fin else 0
    vs = [body_potential(x, w, t) for t in range(-1, top + 3)]
    assert all(a <= b for a, b in zip(vs, vs[1:]))
    sat = sum(wi for xi, wi in zip(x, w) if xi != INF)
    assert body_potential(x, w, top) == sat


@given(vol, st.integers(0, 6), st.integers(1, 60))
def test_extra_spike_never_delays(pairs, t_new, theta):
    x = [a for a, _ in pairs]
    w = [b for _, b in pairs]
    silent = [i for i, a in enumerate(x) if a == INF]
    if not silent:
        return
    before = spike_time(x, w, theta).spike
    x2 = list(x)
    x2[silent[0]] = float(t_new)
    assert spike_time(x2, w, theta).spike <= before


def test_oracle_sweep_against_ideal_spike_time():
    # m lines at time 0 with weight w_max, rest weight 0, w_max = 8
    checked = 0
    for m in range(1, 65):
        x = np.full(128, INF)
        x[:64] = 0
        w = np.zeros(128, dtype=np.int64)
        w[:m] = 8
        for theta in range(1, 513):
            if theta > m * 8:
                break
            assert spike_time(x, w, theta).spike == ideal_spike_time(m, theta), (m, theta)
            checked += 1
    assert checked > 10000


def test_ideal_spike_time_examples():
    assert ideal_spike_time(4, 8) == 1
    assert ideal_spike_time(1, 8) == 7
    assert ideal_spike_time(3, 8) == 2
    with pytest.raises(ValueError):
        ideal_spike_time(0, 8)


def test_extrapolate_examples():
    assert extrapolate_spike_time(2, 9, 512) == 114
    assert extrapolate_spike_time(0, 77, 512) == 0
    assert extrapolate_spike_time(4, 64, 64) == 4
    with pytest.raises(ValueError):
        extrapolate_spike_time(3, 0, 512)
    with pytest.raises(ValueError):
        extrapolate_spike_time(INF, 5, 512)


@given(st.integers(0, 10**6), st.integers(1, 10**4), st.integers(1, 10**4))
def test_extrapolate_is_exact_ceiling(z, v, th):
    from fractions import Fraction
    import math
    assert extrapolate_spike_time(z, v, th) == math.ceil(Fraction(z * th, v))


def test_step_ablation_binarized_spikes_at_zero():
    rng = np.random.default_rng(1)
    for _ in range(200):
        x = np.where(rng.random(32) < 0.5, 0.0, INF)
        w = rng.integers(0, 9, 32)
        s = spike_time(x, w, 20, kind=STEP).spike
        assert s in (0, INF)


def test_potential_trace_matrix_rows_match_single_rows():
    rng = np.random.default_rng(2)
    x = np.where(rng.random(20) < 0.5, rng.integers(0, 4, 20).astype(float), INF)
    W = rng.integers(0, 9, (5, 20))
    t0, v = potential_trace(x, W, 8)
    for j in range(5):
        t0j, vj = potential_trace(x, W[j], 8)
        assert t0j == t0 and np.array_equal(vj, v[j])
