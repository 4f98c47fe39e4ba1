"""CSV writers for run results."""

from __future__ import annotations

import csv
from pathlib import Path

METRIC_FIELDS = ("config_id", "theta", "mu_search", "mu_capture", "mu_backoff",
                 "mu_min", "w_conv", "avg_dist", "c_conv", "purity")
UPDATE_FIELDS = ("bucket_start", "searches", "captures", "backoffs")
TEMPORAL_FIELDS = ("spike_time", "count", "cum_coverage", "cum_purity")
SWEEP_FIELDS = ("warmup", "rank", "purity", "theta", "mu_search", "mu_capture",
                "mu_backoff", "mu_min")
KMEANS_FIELDS = ("seed", "epochs", "purity", "avg_dist", "c_conv")


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6f}"
    return v


def write_rows(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if isinstance(row, dict):
                row = [row[k] for k in header]
            w.writerow([_fmt(v) for v in row])
    return path


def metric_row(config_id, cfg, m) -> dict:
    return dict(config_id=config_id, theta=cfg.theta, mu_search=cfg.mu_search,
                mu_capture=cfg.mu_capture, mu_backoff=cfg.mu_backoff,
                mu_min=cfg.mu_min, w_conv=m.w_conv, avg_dist=m.avg_dist,
                c_conv=m.c_conv, purity=m.purity)


def read_rows(path) -> list:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))
