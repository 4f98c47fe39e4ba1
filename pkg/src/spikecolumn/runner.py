"""Experiment driver: build a column, stream patterns through it, score it."""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .benchgen import (ODD_EVEN, StreamSpec, load_mnist_idx, select_baselines,
                       stream_arrays, synthetic_baselines)
from .column import Column
from .config import ExperimentConfig, default_mnist_paths
from .kmeans import kmeans_evaluate, kmeans_fit
from .metrics import UNASSIGNED, MetricsReport, clustering_report, purity
from .neuron import STEP
from .rng import Rng
from .stdp import PRE, f_minus_table, f_plus_table, train_step
from .volley import bits_to_volley

ODD_WINDOW = (10000, 20000)
SWEEP_WARMUPS = (10000, 20000, 60000)
# offsets around the base config: 27 points per warm-up length, 81 runs in all
SWEEP_GRID = {
    "theta": (-4, 0, 4),
    "mu_capture": (-16, 0, 16),
    "mu_backoff": (-16, 0, 16),
}
SWEEP_BASE = dict(theta=60, mu_search=3, mu_min=32, mu_capture=224, mu_backoff=336)
DRAW_BUDGET = 1 << 22   # draws buffered per kernel call


class MissingDatasetError(FileNotFoundError):
    pass


@dataclass
class RunReport:
    config: ExperimentConfig
    windows: dict                   # window name -> (start, end)
    metrics: dict                   # window name -> MetricsReport
    counts: np.ndarray              # (n, 3) searches, captures, backoffs per pattern
    winners: np.ndarray             # (n,) winner index or -1
    spike_times: np.ndarray         # (n,) winner spike time, -1 if silent
    potentials: np.ndarray          # (n,) winner body potential at the spike
    labels: np.ndarray
    weights: np.ndarray             # final weights
    snapshots: dict = field(default_factory=dict)   # window name -> weights at its end
    elapsed: float = 0.0

    @property
    def primary(self) -> MetricsReport:
        return self.metrics[next(reversed(self.metrics))]

    def buckets(self, size: Optional[int] = None) -> np.ndarray:
        """Rows of (bucket_start, searches, captures, backoffs)."""
        size = size or self.config.bucket
        n = self.counts.shape[0]
        starts = np.arange(0, n, size)
        sums = np.add.reduceat(self.counts, starts, axis=0)
        return np.column_stack([starts, sums])

    def temporal(self, window: Optional[str] = None, theta_f: Optional[int] = None):
        window = window or next(reversed(self.windows))
        theta_f = theta_f if theta_f is not None else self.config.theta_f
        a, b = self.windows[window]
        return temporal_table(self.winners[a:b], self.spike_times[a:b],
                              self.potentials[a:b], self.labels[a:b], theta_f)


def _child_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, k]).generate_state(1, np.uint64)[0] >> 1)


def load_baselines(cfg: ExperimentConfig):
    if cfg.dataset == "synthetic":
        return synthetic_baselines(cfg.rf_size)
    images, labels = cfg.mnist_images, cfg.mnist_labels
    if images is None or labels is None:
        d_img, d_lab = default_mnist_paths()
        images, labels = images or d_img, labels or d_lab
    from pathlib import Path
    for path in (images, labels):
        if not Path(path).is_file():
            raise MissingDatasetError(f"MNIST file not found: {path}")
    imgs, labs = load_mnist_idx(images, labels)
    return select_baselines(imgs, labs, rf=cfg.rf_size,
                            threshold=cfg.binarize_threshold, mode=cfg.exemplar_mode)


def make_stream(cfg: ExperimentConfig, baselines=None):
    baselines = baselines if baselines is not None else load_baselines(cfg)
    spec = StreamSpec(length=cfg.length, noise_p=cfg.noise_pct / 100,
                      schedule=cfg.schedule, transition=cfg.transition,
                      seed=_child_seed(cfg.seed, 0))
    return stream_arrays(baselines, spec)


def initial_weights(cfg: ExperimentConfig) -> np.ndarray:
    shape = (cfg.q, cfg.p)
    if cfg.init == "zeros":
        return np.zeros(shape, dtype=np.int64)
    if cfg.init == "constant":
        return np.full(shape, cfg.init_value, dtype=np.int64)
    rng = np.random.default_rng(_child_seed(cfg.seed, 2))
    w = rng.normal(cfg.init_mean_pct / 100 * cfg.w_max,
                   cfg.init_sd_pct / 100 * cfg.w_max, size=shape)
    return np.clip(np.rint(w), 0, cfg.w_max).astype(np.int64)


def windows_for(cfg: ExperimentConfig) -> dict:
    if cfg.schedule == ODD_EVEN:
        if cfg.length < ODD_WINDOW[1] or cfg.transition < ODD_WINDOW[1]:
            raise ValueError("odd-even runs need the odd window 10000..20000 "
                             "before the transition")
        return {"odds": ODD_WINDOW, "evens": (cfg.warmup, cfg.length)}
    return {"eval": (cfg.warmup, cfg.length)}


def resolve_engine(engine: str) -> str:
    if engine == "auto":
        return "numba" if _kernels.train_binary is not None else "numpy"
    if engine == "numba" and _kernels.train_binary is None:
        raise RuntimeError("numba engine requested but numba is not installed")
    return engine


class _Trainer:
    """Runs a column over binary PosNeg patterns with learning on."""

    def __init__(self, cfg: ExperimentConfig, weights: np.ndarray):
        self.cfg = cfg
        self.col = Column(cfg.p, cfg.q, cfg.theta, cfg.w_max, weights, cfg.response)
        self.params = cfg.params
        self.rng = Rng(_child_seed(cfg.seed, 1), cfg.rng_mode)
        self.engine = resolve_engine(cfg.engine)

    def run(self, bits, winners, times, pots, counts):
        if self.engine == "numba":
            self._run_kernel(bits, winners, times, pots, counts)
        else:
            self._run_numpy(bits, winners, times, pots, counts)

    def _run_kernel(self, bits, winners, times, pots, counts):
        cfg, prm = self.cfg, self.params
        per = 2 * cfg.q * cfg.p
        chunk = max(1, DRAW_BUDGET // per)
        fp, fm = f_plus_table(cfg.w_max), f_minus_table(cfg.w_max)
        ytimes = np.empty((min(chunk, len(bits)), cfg.q), dtype=np.int64)
        for a in range(0, len(bits), chunk):
            b = min(a + chunk, len(bits))
            draws = self.rng.draw((b - a) * per).reshape(b - a, per)
            _kernels.train_binary(
                self.col.weights, bits[a:b], draws, cfg.theta, cfg.w_max,
                cfg.response == STEP, cfg.stdp_signal == PRE,
                prm.mu_search, prm.mu_capture, prm.mu_backoff, prm.mu_min,
                fp, fm, winners[a:b], times[a:b], pots[a:b], counts[a:b],
                ytimes)

    def _run_numpy(self, bits, winners, times, pots, counts):
        for n, b in enumerate(bits):
            res, upd = train_step(self.col, bits_to_volley(b), self.params,
                                  self.rng, self.cfg.stdp_signal)
            if res.winner is None:
                winners[n], times[n], pots[n] = UNASSIGNED, -1, 0
            else:
                winners[n] = res.winner
                times[n] = int(res.spike)
                pots[n] = res.winner_potential
            counts[n] = upd


def run(cfg: ExperimentConfig, baselines=None, stream=None) -> RunReport:
    """Stream warm-up then evaluation patterns, learning throughout."""
    t_start = time.perf_counter()
    windows = windows_for(cfg)
    bits, labels = stream if stream is not None else make_stream(cfg, baselines)
    if len(bits) < cfg.length:
        raise ValueError("stream shorter than warmup + eval_count")
    bits, labels = bits[:cfg.length], labels[:cfg.length]
    n = cfg.length
    winners = np.empty(n, dtype=np.int64)
    times = np.empty(n, dtype=np.int64)
    pots = np.empty(n, dtype=np.int64)
    counts = np.zeros((n, 3), dtype=np.int64)
    trainer = _Trainer(cfg, initial_weights(cfg))

    snapshots = {}
    stops = sorted({end for _, end in windows.values()} | {n})
    pos = 0
    for stop in stops:
        if stop > pos:
            trainer.run(bits[pos:stop], winners[pos:stop], times[pos:stop],
                        pots[pos:stop], counts[pos:stop])
            pos = stop
        for name, (_, end) in windows.items():
            if end == stop:
                snapshots[name] = trainer.col.weights.copy()

    metrics = {}
    for name, (a, b) in windows.items():
        rep = clustering_report(bits[a:b], winners[a:b], labels[a:b], cfg.q,
                                snapshots[name], cfg.w_max)
        s, c, k = (int(v) for v in counts[a:b].sum(axis=0))
        rep.searches, rep.captures, rep.backoffs = s, c, k
        metrics[name] = rep
    return RunReport(cfg, windows, metrics, counts, winners, times, pots, labels,
                     trainer.col.weights.copy(), snapshots,
                     time.perf_counter() - t_start)


def extrapolate_times(times, pots, theta_f: Optional[int]) -> np.ndarray:
    """Vectorized ceil(z_I * theta_F / v); silent patterns stay at -1."""
    times = np.asarray(times, dtype=np.int64)
    if theta_f is None:
        return times.copy()
    pots = np.asarray(pots, dtype=np.int64)
    out = np.full_like(times, -1)
    fired = times >= 0
    if np.any(pots[fired] <= 0):
        raise ValueError("a spiking winner must carry a positive potential")
    out[fired] = -(-(times[fired] * theta_f) // pots[fired])
    return out


def temporal_table(winners, times, pots, labels, theta_f=None):
    """Rows (spike_time, count, cum_coverage, cum_purity) in time order.

    Cumulative purity at time t scores only the patterns whose winner fired
    at or before t, as a clustering of that subset.
    """
    winners = np.asarray(winners)
    fired = winners != UNASSIGNED
    if not fired.any():
        raise ValueError("no winners in the window")
    zf = extrapolate_times(times, pots, theta_f)
    total = winners.size
    rows = []
    for t in np.unique(zf[fired]):
        upto = fired & (zf <= t)
        rows.append((int(t), int(np.sum(zf[fired] == t)),
                     float(upto.sum() / total),
                     float(purity(winners[upto], labels[upto]))))
    return rows


def spike_dispersion(report: RunReport, window: Optional[str] = None) -> int:
    """Number of distinct winner spike times in a window (1 means none)."""
    window = window or next(reversed(report.windows))
    a, b = report.windows[window]
    t = report.spike_times[a:b]
    return int(np.unique(t[t >= 0]).size)


def _run_args(args):
    cfg, stream = args
    return run(cfg, stream=stream)


def sweep_configs(base: ExperimentConfig, grid=None, warmups=SWEEP_WARMUPS):
    grid = SWEEP_GRID if grid is None else grid
    keys = list(grid)
    out = []
    for warm in warmups:
        for offs in itertools.product(*(grid[k] for k in keys)):
            changes = {k: getattr(base, k) + o for k, o in zip(keys, offs)}
            out.append(base.replace(warmup=warm, preset="", **changes))
    return out


def sweep(base: ExperimentConfig, grid=None, warmups=SWEEP_WARMUPS,
          threads: int = 1, baselines=None) -> list:
    """Run every grid point at every warm-up length.

    Grid values are offsets added to ``base``. Every point shares the base
    seed, so the points see the same pattern stream.
    """
    cfgs = sweep_configs(base, grid, warmups)
    if not cfgs:
        raise ValueError("empty sweep grid")
    baselines = baselines if baselines is not None else load_baselines(base)
    longest = max(c.length for c in cfgs)
    stream = make_stream(base.replace(warmup=longest - base.eval_count), baselines)
    jobs = [(c, tuple(a[:c.length] for a in stream)) for c in cfgs]
    if threads <= 1:
        return [_run_args(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_run_args, jobs))


def sweep_rows(reports) -> list:
    """Per warm-up regime, configurations ranked by purity, best first."""
    rows = []
    by_warm = {}
    for r in reports:
        by_warm.setdefault(r.config.warmup, []).append(r)
    for warm in sorted(by_warm):
        ranked = sorted(by_warm[warm], key=lambda r: -r.primary.purity)
        for rank, r in enumerate(ranked):
            c = r.config
            rows.append(dict(warmup=warm, rank=rank, purity=r.primary.purity,
                             theta=c.theta, mu_search=c.mu_search,
                             mu_capture=c.mu_capture, mu_backoff=c.mu_backoff,
                             mu_min=c.mu_min))
    return rows


@dataclass
class KMeansSeedResult:
    seed: int
    epochs: int
    converged: bool
    metrics: MetricsReport


def kmeans_batch(cfg: ExperimentConfig, n_seeds: Optional[int] = None,
                 baselines=None, stream=None) -> list:
    """Fit on the warm-up patterns and score on the evaluation patterns."""
    bits, labels = stream if stream is not None else make_stream(cfg, baselines)
    train, test = bits[:cfg.warmup], bits[cfg.warmup:cfg.length]
    test_labels = labels[cfg.warmup:cfg.length]
    out = []
    for s in range(n_seeds if n_seeds is not None else cfg.kmeans_seeds):
        rng = np.random.default_rng([cfg.seed, 3, s])
        model = kmeans_fit(train, cfg.q, rng, cfg.kmeans_max_epochs)
        out.append(KMeansSeedResult(s, model.epochs_run, model.converged,
                                    kmeans_evaluate(model, test, test_labels)))
    return out
