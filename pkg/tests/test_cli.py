import csv
import io
import json
import subprocess
import sys

import pytest

from conftest import FIXTURES
from refracto.capture import read_capture
from refracto.cli import run_cli


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line and ":" not in line)


@pytest.fixture(scope="module")
def model_path(tmp_path_factory):
    d = tmp_path_factory.mktemp("model")
    water = d / "water.rcap"
    assert cli("simulate", "--brix", 0, "--seed", 3, "--out", water)[0] == 0
    code, out, err = cli(
        "calibrate", "--from-simulator", "0:50:1", "--breakpoint", 17, "--water", water, "--out", d / "m.json"
    )
    assert code == 0, err
    return d / "m.json"


def test_simulate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.rcap", tmp_path / "b.rcap"
    for path in (a, b):
        code, out, _ = cli("simulate", "--brix", 7.2, "--scenario", "normal", "--seed", 1, "--out", path)
        assert code == 0 and "wrote" in out
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.rcap"
    cli("simulate", "--brix", 7.2, "--seed", 2, "--out", c)
    assert c.read_bytes() != a.read_bytes()


def test_simulate_overrides(tmp_path):
    path = tmp_path / "f.rcap"
    cli("simulate", "--scenario", "t800", "--temperature", 24.5, "--led-level", 0.5, "--out", path)
    frame = read_capture(path)
    assert frame.integration_time_us == 800
    assert frame.temperature_c == 24.5
    assert frame.led_level == 0.5


def test_process_empty_capture(tmp_path, model_path):
    cap, cfg = tmp_path / "e.rcap", tmp_path / "c.cfg"
    cfg.write_text("pipeline.diff_threshold = 2.0\n")
    cli("simulate", "--scenario", "empty", "--seed", 4, "--out", cap)
    code, out, err = cli("process", cap, "--model", model_path, "--config", cfg)
    assert code == 0, err
    assert "EMPTY" in out


def test_process_measures_brix(tmp_path, model_path):
    cap = tmp_path / "s.rcap"
    cli("simulate", "--brix", 12.0, "--seed", 5, "--out", cap)
    code, out, _ = cli("process", cap, "--model", model_path)
    assert code == 0
    brix = float(out.split("brix=")[1].split()[0])
    assert brix == pytest.approx(12.0, abs=0.1)


def test_process_without_model_reports_index(tmp_path):
    cap = tmp_path / "s.rcap"
    cli("simulate", "--out", cap)
    code, out, _ = cli("process", cap)
    assert code == 0 and "index1=" in out and "accepted" in out


def test_process_batch_and_stage_dump(tmp_path):
    caps = []
    for i, scenario in enumerate(["normal", "very-low", "empty", "weak-led"]):
        caps.append(tmp_path / f"{i}.rcap")
        cli("simulate", "--scenario", scenario, "--seed", i, "--out", caps[-1])
    code, out, _ = cli("process", *caps)
    assert code == 0
    lines = out.splitlines()
    assert [ln.split(": ")[1].split()[0] for ln in lines] == ["NORMAL", "VERY_LOW", "EMPTY", "NORMAL"]
    assert "rejected" in lines[3]

    stages = tmp_path / "stages.csv"
    assert cli("process", caps[0], "--stages-csv", stages)[0] == 0
    with open(stages) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["pixel", "raw", "deburred", "smoothed", "difference"]
    assert len(rows) == 2497


def test_weak_signal_with_model_is_runtime_error(tmp_path, model_path):
    cap = tmp_path / "w.rcap"
    cli("simulate", "--scenario", "weak-led", "--out", cap)
    code, _, err = cli("process", cap, "--model", model_path)
    assert code == 1 and "light intensity" in err


def test_stats_table1():
    code, out, _ = cli("stats", "--paired", FIXTURES / "table1.csv")
    assert code == 0
    v = kv(out)
    assert v["t"] == "0.652" and v["p"] == "0.522" and v["df"] == "18"
    assert v["sd_diff"] == "0.823" and v["cohens_d"] == "0.150"
    assert (v["ci_low"], v["ci_high"]) == ("-0.27", "0.52")
    assert float(v["pearson_r"]) >= 0.998


def test_stats_summary_and_ci():
    code, out, _ = cli("stats", "--ci-summary", 7.2, 0.1, 50)
    assert code == 0 and kv(out) == {"ci_low": "7.17", "ci_high": "7.23"}
    code, out, _ = cli("stats", "--summary", FIXTURES / "table1.csv", "--columns", "standard,prototype")
    assert code == 0 and "mean=19.5695" in out and "mean=19.4463" in out


def test_calibrate_from_points_csv(tmp_path):
    pts = tmp_path / "pts.csv"
    pts.write_text("position,brix\n" + "".join(f"{p},{0.01 * p:.4f}\n" for p in range(100, 3001, 100)))
    out_model = tmp_path / "m.json"
    code, out, err = cli(
        "calibrate", "--points", pts, "--breakpoint", 17, "--reference-slope", 0.0102,
        "--prototype-slope", 0.01, "--out", out_model,
    )
    assert code == 0, err
    doc = json.loads(out_model.read_text())
    assert doc["k2"] == pytest.approx(1.02)
    assert len(doc["segments"]) == 2
    assert all(seg["slope"] == pytest.approx(0.01) for seg in doc["segments"])


def test_oversample_demo(tmp_path):
    out_csv = tmp_path / "sweep.csv"
    code, out, _ = cli("oversample-demo", "--extra-bits", 2, "--dither-lsb", 1, "--seed", 0, "--out", out_csv)
    assert code == 0
    with open(out_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1000
    assert set(rows[0]) == {"true_volts", "base_code", "enhanced_code", "base_error_lsb", "enhanced_error_lsb"}
    ratio = float(out.split("ratio=")[1])
    assert ratio <= 1 / 3
    assert "f_os=16000 Hz" in out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["simulate"],
        ["simulate", "--out", "x", "--bogus"],
        ["simulate", "--out", "x", "--scenario", "dim"],
        ["stats"],
        ["calibrate", "--out", "m.json"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, _ = cli(*argv)
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["process", "no-such-file.rcap"],
        ["stats", "--paired", "no-such.csv"],
        ["stats", "--ci-summary", "1", "0.1", "1"],
        ["oversample-demo", "--extra-bits", "2", "--dither-lsb", "0.5"],
    ],
)
def test_runtime_errors_exit_1(argv):
    code, _, err = cli(*argv)
    assert code == 1
    assert err.count("\n") == 1


def test_bad_config_is_runtime_error(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("pipeline.window = 3\n")
    code, _, err = cli("simulate", "--config", cfg, "--out", tmp_path / "f.rcap")
    assert code == 1 and "line 1" in err


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "refracto", "stats", "--ci-summary", "7.2", "0.1", "50"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "ci_low=7.17" in proc.stdout
