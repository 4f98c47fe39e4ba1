"""Command-line driver: ``spikecolumn --experiment NAME [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import report as rp
from .benchgen import ODD_EVEN, IdxError
from .column import Column, save_weights
from .config import (EXPERIMENTS, PRESETS, build_config, parse_overrides,
                     read_config_file)
from .runner import (SWEEP_BASE, MissingDatasetError, kmeans_batch,
                     load_baselines, make_stream, run, spike_dispersion, sweep,
                     sweep_rows)

# what each experiment changes unless the user set the key
EXPERIMENT_DEFAULTS = {
    "baseline": {"preset": "search3"},
    "rf18": {"preset": "rf18-search4"},
    "odd-even": {"preset": "search3", "schedule": ODD_EVEN},
    "temporal": {"preset": "search3", "theta_f": 512},
    "ablation-step": {"preset": "search3"},
    "sweep": dict(SWEEP_BASE),
    "kmeans": {},
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spikecolumn",
        description="Train a spiking column on noisy digit streams and report "
                    "clustering metrics as CSV (plus PNG figures).")
    ap.add_argument("--config", type=Path, help="file of 'key = value' lines")
    ap.add_argument("--experiment", choices=EXPERIMENTS)
    ap.add_argument("--preset", choices=sorted(PRESETS))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--mnist-images", type=Path)
    ap.add_argument("--mnist-labels", type=Path)
    ap.add_argument("--out-dir", type=Path, default=Path("out"))
    ap.add_argument("--threads", type=int, default=1, help="sweep workers")
    ap.add_argument("--set", dest="overrides", action="append", default=[],
                    metavar="KEY=VALUE", help="override one config key")
    ap.add_argument("--no-plots", action="store_true", help="write CSVs only")
    return ap


def resolve_config(args):
    values = read_config_file(args.config) if args.config else {}
    values.update(parse_overrides(args.overrides))
    if args.experiment:
        values["experiment"] = args.experiment
    if args.preset:
        values["preset"] = args.preset
    if args.seed is not None:
        values["seed"] = args.seed
    if args.mnist_images:
        values["mnist_images"] = str(args.mnist_images)
    if args.mnist_labels:
        values["mnist_labels"] = str(args.mnist_labels)
    exp = values.get("experiment", "baseline")
    merged = dict(EXPERIMENT_DEFAULTS[exp])
    if "preset" in values:
        merged.pop("preset", None)
    merged.update(values)
    return build_config(merged)


class Outputs:
    def __init__(self, out_dir: Path, plots: bool):
        self.dir = out_dir
        self.plots = plots
        self.written = []
        out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name):
        p = self.dir / name
        self.written.append(p)
        return p

    def csv(self, name, header, rows):
        rp.write_rows(self.path(name), header, rows)

    def figure(self, fn, name, *a, **kw):
        if self.plots:
            from . import plotting
            getattr(plotting, fn)(*a, path=self.path(name), **kw)


def _save_run(out: Outputs, rep, tag=""):
    cfg = rep.config
    out.csv(f"updates{tag}.csv", rp.UPDATE_FIELDS, rep.buckets().tolist())
    col = Column(cfg.p, cfg.q, cfg.theta, cfg.w_max, rep.weights, cfg.response)
    save_weights(col, out.path(f"weights{tag}.txt"))
    trans = cfg.transition if cfg.schedule == ODD_EVEN else None
    out.figure("plot_updates", f"updates{tag}.png", rep.buckets(), bucket=cfg.bucket,
               transition=trans)
    out.figure("plot_weights", f"weights{tag}.png", rep.weights, cfg.rf_size, cfg.w_max)


def _summary(name, m):
    print(f"{name}: purity={m.purity:.4f} c_conv={m.c_conv:.4f} "
          f"avg_dist={m.avg_dist:.2f} w_conv={m.w_conv:.4f} coverage={m.coverage:.4f}")


def run_experiment(cfg, out: Outputs, threads: int = 1):
    exp = cfg.experiment
    if exp == "sweep":
        reports = sweep(cfg, threads=threads)
        rows = sweep_rows(reports)
        out.csv("sweep.csv", rp.SWEEP_FIELDS, rows)
        out.csv("metrics.csv", rp.METRIC_FIELDS,
                [rp.metric_row(f"{r.config.config_id}-w{r.config.warmup}", r.config,
                               r.primary) for r in reports])
        out.figure("plot_sweep", "sweep.png", rows)
        for warm in sorted({r["warmup"] for r in rows}):
            best = [r for r in rows if r["warmup"] == warm][0]
            print(f"warmup {warm}: best purity {best['purity']:.4f}")
        return
    if exp == "kmeans":
        res = kmeans_batch(cfg)
        out.csv("kmeans.csv", rp.KMEANS_FIELDS,
                [(r.seed, r.epochs, r.metrics.purity, r.metrics.avg_dist,
                  r.metrics.c_conv) for r in res])
        pur = np.array([r.metrics.purity for r in res])
        out.figure("plot_kmeans", "kmeans.png", pur)
        print(f"kmeans: {len(res)} seeds, purity mean={pur.mean():.4f} "
              f"min={pur.min():.4f} max={pur.max():.4f}")
        return
    if exp == "ablation-step":
        baselines = load_baselines(cfg)
        stream = make_stream(cfg, baselines)
        rows, disp = [], []
        for kind in ("ramp", "step"):
            rep = run(cfg.replace(response=kind), stream=stream)
            rows.append(rp.metric_row(f"{cfg.config_id}-{kind}", rep.config, rep.primary))
            disp.append((kind, spike_dispersion(rep)))
            _save_run(out, rep, f"-{kind}")
            _summary(kind, rep.primary)
        out.csv("metrics.csv", rp.METRIC_FIELDS, rows)
        out.csv("dispersion.csv", ("response", "distinct_spike_times"), disp)
        return

    rep = run(cfg)
    out.csv("metrics.csv", rp.METRIC_FIELDS,
            [rp.metric_row(cfg.config_id if len(rep.metrics) == 1
                           else f"{cfg.config_id}-{name}", cfg, m)
             for name, m in rep.metrics.items()])
    _save_run(out, rep)
    for name, m in rep.metrics.items():
        _summary(name, m)
    if cfg.theta_f is not None:
        rows = rep.temporal()
        out.csv("temporal.csv", rp.TEMPORAL_FIELDS, rows)
        out.figure("plot_temporal", "temporal.png", rows)
        print(f"temporal: {len(rows)} distinct spike times at theta_f={cfg.theta_f}")


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (ValueError, KeyError, TypeError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        return _fail("invalid_config", str(msg), 2)
    out = Outputs(args.out_dir, not args.no_plots)
    try:
        run_experiment(cfg, out, max(1, args.threads))
    except MissingDatasetError as exc:
        return _fail("missing_dataset", str(exc), 3)
    except IdxError as exc:
        return _fail("bad_dataset", str(exc), 3)
    except ValueError as exc:
        return _fail("invalid_config", str(exc), 2)
    print(f"wrote {len(out.written)} files to {out.dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
