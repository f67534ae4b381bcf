import csv
import json
import time
from pathlib import Path

import pytest

from crosswind.cli import EXIT_CONFIG, EXIT_CRASH, EXIT_OK, main
from crosswind.harness import (
    BAND_COLUMNS,
    ENVELOPE_COLUMNS,
    LOOP_COLUMNS,
    SENSOR_DECISION_COLUMNS,
    SIGN_COLUMNS,
    SUMMARY_COLUMNS,
    TRAJECTORY_COLUMNS,
    format_value,
)

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_golden_columns():
    assert LOOP_COLUMNS == ("loop", "t_end", "f_bar", "f_left", "f_right", "delta_f", "n_samples", "n_left",
                            "n_right", "center_phi", "center_theta")
    assert SUMMARY_COLUMNS == ("key", "value")
    assert TRAJECTORY_COLUMNS == ("t", "phi", "theta", "phi_dot", "theta_dot", "psi", "tension", "slack",
                                  "wind_speed", "wind_direction", "event")
    assert BAND_COLUMNS == ("n_avg", "band", "lower_edge", "upper_edge")
    assert ENVELOPE_COLUMNS == ("n_avg", "offset", "upper", "lower")
    assert SENSOR_DECISION_COLUMNS[0] == "decision" and SENSOR_DECISION_COLUMNS[-1] == "match"
    assert SIGN_COLUMNS == ("offset", "true_sign", "measured_sign")


def test_format_value():
    assert format_value(1 / 3) == "0.333333333"
    assert format_value(12345678901.0) == "1.23456789e+10"
    assert format_value(7) == "7"
    assert format_value(True) == "1"
    assert format_value(float("nan")) == "nan"
    assert format_value("phi") == "phi"


def test_sweep_run(tmp_path, capsys):
    assert main(["run", str(SCENARIOS / "sweep_phi.yaml"), "--out-dir", str(tmp_path)]) == EXIT_OK
    rows = read_csv(tmp_path / "sweep_phi_sweep.csv")
    assert rows[0] == ["phi_offset", "f_bar", "delta_f", "f_bar_norm"]
    assert len(rows) == 22
    manifest = json.loads((tmp_path / "sweep_phi_manifest.json").read_text())
    assert manifest["kind"] == "sweep"
    assert manifest["files"]["sweep_phi_sweep.csv"]["rows"] == 21
    assert "sweep_phi_sweep.csv" in capsys.readouterr().out


def test_adapt_run_is_fast_and_deterministic(tmp_path):
    text = (SCENARIOS / "adapt_tracking.yaml").read_text()
    scen = write(tmp_path, "track.yaml", text.replace("trajectory: false", "trajectory: true"))
    t0 = time.perf_counter()
    assert main(["run", str(scen), "--out-dir", str(tmp_path / "a")]) == EXIT_OK
    assert time.perf_counter() - t0 < 5.0
    assert main(["run", str(scen), "--out-dir", str(tmp_path / "b")]) == EXIT_OK
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["adapt_tracking_decisions.csv", "adapt_tracking_loops.csv", "adapt_tracking_manifest.json",
                     "adapt_tracking_summary.csv", "adapt_tracking_trajectory.csv"]
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
    decisions = read_csv(tmp_path / "a" / "adapt_tracking_decisions.csv")
    assert decisions[0] == ["decision", "t", "phase", "delta_f", "f_bar", "step_phi", "step_theta", "phi_c",
                            "theta_c"]
    assert len(read_csv(tmp_path / "a" / "adapt_tracking_trajectory.csv")) == 15001


def test_seed_override_changes_output(tmp_path):
    scen = SCENARIOS / "adapt_tracking.yaml"
    main(["run", str(scen), "--out-dir", str(tmp_path / "a")])
    main(["run", str(scen), "--out-dir", str(tmp_path / "b"), "--seed-override", "3"])
    a = (tmp_path / "a" / "adapt_tracking_loops.csv").read_bytes()
    b = (tmp_path / "b" / "adapt_tracking_loops.csv").read_bytes()
    assert a != b


def test_sensor_study_run(tmp_path):
    assert main(["run", str(SCENARIOS / "sensor_study.yaml"), "--out-dir", str(tmp_path)]) == EXIT_OK
    rows = read_csv(tmp_path / "sensor_study_sensor_decisions.csv")
    assert len(rows) == 51
    sign = read_csv(tmp_path / "sensor_study_sign.csv")
    assert len(sign) == 26


def test_small_turbulence_study(tmp_path):
    scen = write(tmp_path, "turb.yaml", """
kind: turbulence_study
simulation: {duration: 40, skip_loops: 2}
seeds: {wind: 0, count: 2}
turbulence_study:
  offsets: {start: -0.6, stop: 0.6, count: 5}
  n_avgs: [1, 3]
""")
    assert main(["run", str(scen), "--out-dir", str(tmp_path), "--threads", "2"]) == EXIT_OK
    bands = read_csv(tmp_path / "turb_bands.csv")
    assert bands[0] == list(BAND_COLUMNS) and len(bands) == 3
    assert len(read_csv(tmp_path / "turb_envelopes.csv")) == 11


def test_validate(tmp_path, capsys):
    assert main(["validate", str(SCENARIOS / "adapt_calm.yaml")]) == EXIT_OK
    assert "ok (adapt)" in capsys.readouterr().out


def test_config_error_exit(tmp_path, capsys):
    scen = write(tmp_path, "bad.yaml", "kind: sweep\nshear: {alpha: 1.5}\nsweep: {axes: []}\n")
    assert main(["validate", str(scen)]) == EXIT_CONFIG
    assert main(["run", str(scen)]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err
    assert main(["run", str(SCENARIOS / "adapt_calm.yaml"), "--threads", "0"]) == EXIT_CONFIG


def test_crash_exit(tmp_path, capsys):
    scen = write(tmp_path, "still.yaml", "kind: adapt\nshear: {w0: 0}\nseeds: {wind: 0}\nadapt: {}\n"
                                         "simulation: {duration: 30}\n")
    assert main(["run", str(scen), "--out-dir", str(tmp_path)]) == EXIT_CRASH
    assert "simulation crash" in capsys.readouterr().err


def test_missing_file_exit(tmp_path):
    assert main(["run", str(tmp_path / "nope.yaml")]) not in (EXIT_OK, EXIT_CONFIG, EXIT_CRASH)


def test_console_script_help():
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
