"""Temporal-coding spiking column: an online clustering engine with STDP."""

from .column import Column, InferenceResult, load_weights, save_weights, wta
from .config import PRESETS, ExperimentConfig, build_config
from .kmeans import KMeansModel, kmeans_evaluate, kmeans_fit
from .metrics import MetricsReport, avg_dist, c_conv, clustering_report, purity, sad, w_conv
from .neuron import (body_potential, extrapolate_spike_time, ideal_spike_time,
                     response, spike_time)
from .rng import Rng
from .runner import RunReport, kmeans_batch, run, sweep, temporal_table
from .stdp import StdpParams, UpdateCounts, UpdateKind, apply_stdp, stdp_update, train_step
from .volley import INF, BinaryImage, posneg_encode

__version__ = "0.1.0"
