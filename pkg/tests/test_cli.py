import json
import math

import pytest

from rydcav.cli import EXIT_CONFIG, EXIT_DIVERGENCE, main
from rydcav.presets import by_name
from rydcav.runner import read_csv


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_run_preset(tmp_path, capsys):
    assert main(["run", "--preset", "fig2", "--n", "1", "--out", str(tmp_path)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["fitted_rabi_2pi_mhz"] == pytest.approx(14.0, rel=0.02)
    assert (tmp_path / "fig2-n1.csv").exists() and (tmp_path / "fig2-n1.config.json").exists()


def test_run_fig9_strong_efficiency_bounded(tmp_path, capsys):
    assert main(["run", "--preset", "fig9", "--kappa-mode", "strong", "--out", str(tmp_path)]) == 0
    eff = json.loads(capsys.readouterr().out)["efficiency"]
    assert 0 < eff <= 2


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = by_name("fig2-n1")
    cfg["pulses"]["omega"][0]["tau_us"] = -1.0
    assert main(["run", "--config", write(tmp_path, "bad.json", cfg)]) == EXIT_CONFIG
    assert "pulses.omega[0].tau_us" in capsys.readouterr().err


def test_unknown_preset_option(capsys):
    assert main(["run", "--preset", "fig2", "--n", "9"]) == EXIT_CONFIG
    assert main(["run", "--config", "/nonexistent.json"]) == EXIT_CONFIG


def test_divergence_exit_code(tmp_path, capsys):
    cfg = by_name("fig2-n1")
    cfg["system"]["g_2pi_mhz"] = 2000.0
    cfg["integrator"] = {"dt_us": 0.05, "stride": 1, "max_phase": 1e9}
    assert main(["run", "--config", write(tmp_path, "div.json", cfg), "--out", str(tmp_path)]) == EXIT_DIVERGENCE
    assert "non-finite" in capsys.readouterr().err


def test_step_bound_is_config_error(tmp_path):
    cfg = by_name("fig2-n1")
    cfg["integrator"] = {"dt_us": 0.05}
    assert main(["run", "--config", write(tmp_path, "big.json", cfg)]) == EXIT_CONFIG


def test_design(tmp_path, capsys):
    cfg = {"geometry": {"length_um": 50.0, "radius_mm": 25.0},
           "interaction": {"c_p": 220.0 * 6.3**6, "p": 6, "distance_um": 6.3},
           "sweep_lengths_um": [40.0, 50.0, 60.0]}
    assert main(["design", "--config", write(tmp_path, "d.json", cfg), "--out", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["finesse"] == pytest.approx(3.8e4, rel=0.01)
    assert out["g_2pi_mhz"] == pytest.approx(50, rel=0.10)
    assert out["delta_r_2pi_mhz"] == pytest.approx(220.0)
    rows = read_csv(tmp_path / "design_sweep.csv")
    assert list(rows["length_um"]) == [40.0, 50.0, 60.0]
    assert json.loads((tmp_path / "design.json").read_text()) == out


def test_design_errors(tmp_path, capsys):
    bad = {"geometry": {"length_um": 60000.0, "radius_mm": 25.0}}
    assert main(["design", "--config", write(tmp_path, "g.json", bad)]) == EXIT_CONFIG
    bad = {"geometry": {"length_um": 50.0, "radius_mm": 25.0}, "interaction": {"c_p": 1.0, "p": 6, "distance_um": 0}}
    assert main(["design", "--config", write(tmp_path, "i.json", bad)]) == EXIT_CONFIG
    assert main(["design", "--config", write(tmp_path, "m.json", {"geometry": {"radius_mm": 25.0}})]) == EXIT_CONFIG
    assert "geometry.length_um" in capsys.readouterr().err


def test_validate_n1(tmp_path, capsys):
    assert main(["validate", "--n", "1", "--out", str(tmp_path)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["max_population_deviation"] < 1e-9
    assert (tmp_path / "validate-n1.json").exists()


def test_sweep_from_config(tmp_path, capsys):
    base = by_name("fig7-weak-n1")
    base["time"]["t_end_us"] = 0.8
    cfg = {"name": "tiny", "base": base, "sweep": {"axis": "N", "values": [1, 2]}}
    assert main(["sweep", "--config", write(tmp_path, "s.json", cfg), "--out", str(tmp_path)]) == 0
    rows = read_csv_rows(tmp_path / "tiny.csv")
    assert [r["N"] for r in rows] == ["1", "2"]
    assert all(0 < float(r["efficiency"]) < 1.5 for r in rows)
    assert not math.isnan(float(rows[0]["C"]))


def read_csv_rows(path):
    import csv
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
