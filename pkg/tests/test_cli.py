import json

import pytest

from spikecolumn.cli import main
from spikecolumn.column import load_weights
from spikecolumn.report import METRIC_FIELDS, UPDATE_FIELDS, read_rows

SMALL = ["--set", "dataset=synthetic", "--set", "warmup=2000", "--set", "eval_count=1000"]


def test_baseline_writes_csvs_and_figures(tmp_path, capsys):
    assert main(["--experiment", "baseline", "--out-dir", str(tmp_path), *SMALL]) == 0
    rows = read_rows(tmp_path / "metrics.csv")
    assert list(rows[0]) == list(METRIC_FIELDS)
    assert rows[0]["config_id"] == "search3" and rows[0]["theta"] == "60"
    upd = read_rows(tmp_path / "updates.csv")
    assert list(upd[0]) == list(UPDATE_FIELDS) and len(upd) == 3
    col = load_weights(tmp_path / "weights.txt")
    assert (col.p, col.q) == (128, 10)
    for png in ("updates.png", "weights.png"):
        assert (tmp_path / png).read_bytes()[:4] == b"\x89PNG"
    assert "purity=" in capsys.readouterr().out


def test_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["--seed", "7", "--out-dir", str(d), "--no-plots", *SMALL]) == 0
    for name in ("metrics.csv", "updates.csv", "weights.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert not list(a.glob("*.png"))


def test_temporal_and_ablation(tmp_path):
    t = tmp_path / "t"
    assert main(["--experiment", "temporal", "--out-dir", str(t), *SMALL]) == 0
    rows = read_rows(t / "temporal.csv")
    assert list(rows[0]) == ["spike_time", "count", "cum_coverage", "cum_purity"]
    assert (t / "temporal.png").exists()
    s = tmp_path / "s"
    assert main(["--experiment", "ablation-step", "--out-dir", str(s), "--no-plots",
                 *SMALL]) == 0
    disp = {r["response"]: int(r["distinct_spike_times"])
            for r in read_rows(s / "dispersion.csv")}
    assert disp["step"] == 1
    assert len(read_rows(s / "metrics.csv")) == 2


def test_config_file_and_kmeans(tmp_path):
    cfg = tmp_path / "k.cfg"
    cfg.write_text("experiment = kmeans\ndataset = synthetic\nwarmup = 2000\n"
                   "eval_count = 500\nkmeans_seeds = 3\n")
    assert main(["--config", str(cfg), "--out-dir", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "kmeans.csv")
    assert [r["seed"] for r in rows] == ["0", "1", "2"]
    assert (tmp_path / "kmeans.png").exists()


def test_odd_even_and_sweep(tmp_path):
    o = tmp_path / "o"
    assert main(["--experiment", "odd-even", "--out-dir", str(o), "--no-plots",
                 "--set", "dataset=synthetic", "--set", "warmup=30000",
                 "--set", "eval_count=5000", "--set", "transition=25000"]) == 0
    ids = [r["config_id"] for r in read_rows(o / "metrics.csv")]
    assert ids == ["search3-odds", "search3-evens"]


@pytest.mark.parametrize("argv, kind, code", [
    (["--set", "theta=0"], "invalid_config", 2),
    (["--set", "bogus=1"], "invalid_config", 2),
    (["--mnist-images", "/nonexistent/x", "--mnist-labels", "/nonexistent/y"],
     "missing_dataset", 3),
])
def test_errors_are_machine_readable(tmp_path, capsys, argv, kind, code):
    assert main([*argv, "--out-dir", str(tmp_path)]) == code
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == kind and err["message"]


def test_bad_idx_file(tmp_path, capsys):
    bad = tmp_path / "bad"
    bad.write_bytes(b"\x00\x00\x08\x01" + b"\x00" * 8)
    assert main(["--mnist-images", str(bad), "--mnist-labels", str(bad),
                 "--out-dir", str(tmp_path)]) == 3
    assert json.loads(capsys.readouterr().err)["error"] == "bad_dataset"
