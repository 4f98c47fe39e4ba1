"""Experiment configuration: presets, ``key = value`` files and overrides."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .benchgen import INDEX_MODES, ODD_EVEN, UNIFORM
from .neuron import RESPONSES
from .rng import DENOM, LFSR, STANDARD
from .stdp import POST, PRE, StdpParams

EXPERIMENTS = ("baseline", "sweep", "odd-even", "rf18", "temporal",
               "ablation-step", "kmeans")
INITS = ("zeros", "constant", "normal")
DATASETS = ("mnist", "synthetic")
ENGINES = ("auto", "numba", "numpy")

ENUMS = {
    "experiment": EXPERIMENTS, "init": INITS, "schedule": (UNIFORM, ODD_EVEN),
    "response": RESPONSES, "stdp_signal": (POST, PRE),
    "rng_mode": (STANDARD, LFSR), "dataset": DATASETS,
    "exemplar_mode": INDEX_MODES, "engine": ENGINES,
}
PATH_KEYS = ("mnist_images", "mnist_labels")

# reference parameter rows for the 8x8 baseline and 18x18 runs
PRESETS = {
    "search2": dict(theta=60, mu_search=2, mu_min=32, mu_capture=224, mu_backoff=304),
    "search3": dict(theta=60, mu_search=3, mu_min=32, mu_capture=224, mu_backoff=320),
    "search4": dict(theta=60, mu_search=4, mu_min=32, mu_capture=224, mu_backoff=336),
    "search0-w7": dict(theta=60, mu_search=0, mu_min=36, mu_capture=256,
                       mu_backoff=320, init="constant", init_value=7),
    "search0-normal": dict(theta=60, mu_search=0, mu_min=36, mu_capture=208,
                           mu_backoff=304, init="normal", init_mean_pct=80,
                           init_sd_pct=5),
    "rf18-search4": dict(rf_size=18, theta=56, mu_search=4, mu_min=40,
                         mu_capture=232, mu_backoff=288),
    "rf18-search0": dict(rf_size=18, theta=56, mu_search=0, mu_min=40,
                         mu_capture=224, mu_backoff=240, init="constant",
                         init_value=7),
}
BASELINE_ROWS = ("search2", "search3", "search4", "search0-w7", "search0-normal")


@dataclass
class ExperimentConfig:
    experiment: str = "baseline"
    preset: str = ""
    rf_size: int = 8
    q: int = 10
    theta: int = 60
    theta_f: Optional[int] = None
    w_max: int = 8
    mu_search: int = 3
    mu_capture: int = 224
    mu_backoff: int = 320
    mu_min: int = 32
    init: str = "zeros"
    init_value: int = 7
    init_mean_pct: int = 80
    init_sd_pct: int = 5
    warmup: int = 60000
    eval_count: int = 10000
    seed: int = 0
    noise_pct: int = 30
    schedule: str = UNIFORM
    transition: int = 34916
    response: str = "ramp"
    stdp_signal: str = POST
    rng_mode: str = STANDARD
    dataset: str = "mnist"
    mnist_images: Optional[str] = None
    mnist_labels: Optional[str] = None
    exemplar_mode: str = "class0"
    binarize_threshold: int = 128
    bucket: int = 1000
    kmeans_seeds: int = 64
    kmeans_max_epochs: int = 100
    engine: str = "auto"

    def __post_init__(self):
        self.validate()

    @property
    def p(self) -> int:
        return 2 * self.rf_size * self.rf_size

    @property
    def length(self) -> int:
        return self.warmup + self.eval_count

    @property
    def params(self) -> StdpParams:
        return StdpParams(self.mu_search, self.mu_capture, self.mu_backoff,
                          self.mu_min, self.w_max)

    @property
    def config_id(self) -> str:
        return self.preset or (
            f"th{self.theta}-s{self.mu_search}-c{self.mu_capture}"
            f"-b{self.mu_backoff}-m{self.mu_min}")

    def validate(self):
        for key, allowed in ENUMS.items():
            if getattr(self, key) not in allowed:
                raise ValueError(f"{key}={getattr(self, key)!r}; expected one of {allowed}")
        for key in ("mu_search", "mu_capture", "mu_backoff", "mu_min"):
            v = getattr(self, key)
            if not 0 <= v <= DENOM:
                raise ValueError(f"{key}={v} outside [0, {DENOM}]")
        if self.theta < 1 or self.w_max < 1 or self.q < 1:
            raise ValueError("theta, w_max and q must be positive")
        if self.theta_f is not None and self.theta_f < self.theta:
            raise ValueError("theta_f must be >= theta")
        if not 1 <= self.rf_size <= 28:
            raise ValueError("rf_size must lie in 1..28")
        if self.warmup < 0 or self.eval_count < 1:
            raise ValueError("warmup must be >= 0 and eval_count >= 1")
        if not 0 <= self.noise_pct <= 100:
            raise ValueError("noise_pct must lie in 0..100")
        if self.schedule == ODD_EVEN and not 0 < self.transition < self.length:
            raise ValueError("transition must fall inside the stream")
        if not 0 <= self.init_value <= self.w_max:
            raise ValueError("init_value outside [0, w_max]")
        if self.bucket < 1:
            raise ValueError("bucket must be positive")

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _coerce(name: str, raw: str):
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    if name not in types:
        raise KeyError(f"unknown config key {name!r}")
    raw = raw.strip()
    if name in PATH_KEYS:
        return raw or None
    if name in ENUMS or name == "preset":
        return raw
    if name == "theta_f" and raw.lower() in ("", "none"):
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"config key {name!r} needs an integer, got {raw!r}") from None


def parse_overrides(pairs) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ValueError(f"expected key = value, got {item!r}")
        key, value = item.split("=", 1)
        key = key.strip().replace("-", "_")
        out[key] = _coerce(key, value)
    return out


def read_config_file(path) -> dict:
    lines = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return parse_overrides(lines)


def build_config(values: dict) -> ExperimentConfig:
    """Preset values first, then explicit keys on top."""
    values = dict(values)
    preset = values.get("preset") or ""
    if preset and preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; known: {sorted(PRESETS)}")
    merged = dict(PRESETS.get(preset, {}))
    merged.update(values)
    return ExperimentConfig(**merged)


def default_mnist_paths():
    root = Path(os.environ.get("SPIKECOLUMN_MNIST_DIR", "/root/data/mnist"))
    return root / "train-images.idx3-ubyte", root / "train-labels.idx1-ubyte"
