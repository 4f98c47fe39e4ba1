import hashlib

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spikecolumn.benchgen import ODD_EVEN, synthetic_baselines
from spikecolumn.config import (PRESETS, BASELINE_ROWS, ExperimentConfig, build_config,
                                parse_overrides, read_config_file)
from spikecolumn.neuron import extrapolate_spike_time, spike_time
from spikecolumn.runner import (MissingDatasetError, extrapolate_times,
                                initial_weights, run, spike_dispersion, sweep,
                                sweep_configs, sweep_rows, temporal_table)
from spikecolumn.volley import INF

SMALL = dict(dataset="synthetic", warmup=3000, eval_count=1000)


def small(**kw):
    return build_config({**SMALL, "preset": "search3", **kw})


def digest(rep):
    h = hashlib.sha256()
    for a in (rep.weights, rep.winners, rep.spike_times, rep.potentials, rep.counts):
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()


def test_baseline_presets_verbatim():
    assert PRESETS["search3"] == dict(theta=60, mu_search=3, mu_min=32,
                                      mu_capture=224, mu_backoff=320)
    assert [PRESETS[r]["mu_backoff"] for r in BASELINE_ROWS] == [304, 320, 336, 320, 304]
    cfg = build_config({"preset": "rf18-search4"})
    assert (cfg.p, cfg.theta, cfg.mu_capture) == (648, 56, 232)


def test_config_file_and_overrides(tmp_path):
    f = tmp_path / "c.cfg"
    f.write_text("# comment\npreset = search4\ntheta = 64  # inline\nschedule = odd-even\n")
    vals = read_config_file(f)
    cfg = build_config(vals)
    assert cfg.theta == 64 and cfg.mu_search == 4 and cfg.schedule == ODD_EVEN
    assert parse_overrides(["theta_f = none"]) == {"theta_f": None}
    with pytest.raises(KeyError):
        parse_overrides(["nope = 1"])
    with pytest.raises(ValueError):
        parse_overrides(["theta = 1.5"])
    with pytest.raises(ValueError):
        build_config({"preset": "unknown"})
    with pytest.raises(ValueError):
        ExperimentConfig(mu_capture=2000)
    with pytest.raises(ValueError):
        ExperimentConfig(response="sigmoid")
    with pytest.raises(ValueError):
        ExperimentConfig(theta_f=10)


def test_initial_weights_variants():
    assert not initial_weights(small()).any()
    assert np.all(initial_weights(small(init="constant", init_value=7)) == 7)
    w = initial_weights(build_config({**SMALL, "preset": "search0-normal"}))
    assert w.min() >= 0 and w.max() <= 8
    assert abs(w.mean() - 6.4) < 0.1


def test_full_run_replays_bit_exact():
    a, b = run(small(seed=3)), run(small(seed=3))
    assert digest(a) == digest(b)
    assert a.primary == b.primary
    assert digest(run(small(seed=4))) != digest(a)


@pytest.mark.parametrize("kw", [{}, {"response": "step"}, {"stdp_signal": "pre"},
                                {"rng_mode": "lfsr"}, {"preset": "search0-normal"}])
def test_compiled_and_reference_engines_agree(kw):
    cfg = small(warmup=400, eval_count=200, seed=2, **kw)
    a = run(cfg.replace(engine="numba"))
    b = run(cfg.replace(engine="numpy"))
    assert digest(a) == digest(b)


def test_learning_stays_on_during_evaluation():
    rep = run(small())
    a, b = rep.windows["eval"]
    assert rep.counts[a:b].sum() > 0
    assert b - a == 1000 and rep.counts.shape == (4000, 3)


def test_report_fields_and_buckets():
    rep = run(small(seed=1))
    m = rep.primary
    assert 0 <= m.purity <= 1 and 0 <= m.c_conv <= 1 and m.avg_dist >= 0
    bk = rep.buckets(1000)
    assert bk[:, 0].tolist() == [0, 1000, 2000, 3000]
    assert np.array_equal(bk[:, 1:].sum(axis=0), rep.counts.sum(axis=0))
    assert m.searches + m.captures + m.backoffs == rep.counts[3000:].sum()


def test_odd_even_windows():
    cfg = build_config({"dataset": "synthetic", "preset": "search3",
                        "schedule": ODD_EVEN, "warmup": 30000, "eval_count": 10000,
                        "transition": 25000})
    rep = run(cfg)
    assert rep.windows == {"odds": (10000, 20000), "evens": (30000, 40000)}
    assert set(rep.labels[10000:20000] % 2) == {1}
    assert set(rep.labels[30000:] % 2) == {0}
    assert set(rep.snapshots) == {"odds", "evens"}


def test_missing_dataset(tmp_path):
    cfg = ExperimentConfig(mnist_images=str(tmp_path / "a"),
                           mnist_labels=str(tmp_path / "b"), warmup=10, eval_count=10)
    with pytest.raises(MissingDatasetError):
        run(cfg)


@given(st.integers(0, 2**31))
def test_theta_f_equal_theta_is_identity_on_binary_ramp(seed):
    # at theta_F = theta_I the rescaled time equals the raw crossing time
    rng = np.random.default_rng(seed)
    w = rng.integers(0, 9, 64)
    x = np.where(rng.random(64) < 0.5, 0.0, INF)
    theta = int(rng.integers(1, 200))
    s, v = spike_time(x, w, theta)
    if s != INF:
        assert extrapolate_spike_time(int(s), v, theta) == s


def test_temporal_table():
    winners = np.array([0, 1, -1, 0, 1, 1])
    times = np.array([1, 2, -1, 1, 3, 2])
    pots = np.array([60, 70, 0, 64, 80, 61])
    labels = np.array([4, 5, 5, 4, 4, 5])
    rows = temporal_table(winners, times, pots, labels, theta_f=512)
    zf = [-(-t * 512 // v) for t, v in zip(times, pots) if t >= 0]
    assert [r[0] for r in rows] == sorted(set(zf))
    assert sum(r[1] for r in rows) == 5
    assert rows[-1][2] == pytest.approx(5 / 6)
    # cumulative purity scores the fired subset only: 4 of its 5 patterns
    assert rows[-1][3] == pytest.approx(4 / 5)
    raw = temporal_table(winners, times, pots, labels)
    assert [r[0] for r in raw] == [1, 2, 3]
    with pytest.raises(ValueError):
        temporal_table(np.full(3, -1), times[:3], pots[:3], labels[:3])
    assert extrapolate_times(times, pots, None).tolist() == times.tolist()


def test_step_ablation_has_no_dispersion():
    rep = run(small(response="step"))
    assert spike_dispersion(rep) == 1
    assert set(rep.spike_times[rep.winners >= 0]) == {0}


def test_sweep_grid_shape_and_one_point_identity():
    base = small()
    assert len(sweep_configs(base)) == 81
    one = sweep(base, grid={"theta": (0,)}, warmups=(base.warmup,),
                baselines=synthetic_baselines(8))
    assert len(one) == 1
    assert digest(one[0]) == digest(run(base))
    rows = sweep_rows(sweep(base, grid={"theta": (-4, 0)}, warmups=(1000, 3000),
                            baselines=synthetic_baselines(8)))
    assert [r["warmup"] for r in rows] == [1000, 1000, 3000, 3000]
    for w in (1000, 3000):
        p = [r["purity"] for r in rows if r["warmup"] == w]
        assert p == sorted(p, reverse=True)
