import csv
import json

import numpy as np
import pytest

import oracles
from llgspm.cli import main
from llgspm.io import read_snapshot_csv, write_snapshot_csv
from llgspm.mesh import Mesh, VectorField


def _snap(tmp_path, data, name="in.csv"):
    mesh = Mesh(data.shape[-1], dx=1.0 / data.shape[-1])
    p = tmp_path / name
    write_snapshot_csv(p, VectorField(mesh, data))
    return p


def test_invalid_subcommand_exits_2(capsys):
    assert main(["frobnicate"]) == 2
    assert capsys.readouterr().err.startswith("error:")
    assert main([]) == 2
    assert main(["converge", "--case", "2d"]) == 2


@pytest.mark.parametrize("scheme", ["gspm", "a", "b"])
def test_step_debug_fixed_point(scheme, tmp_path, capsys):
    data = np.zeros((3, 1, 1, 8))
    data[2] = 1.0
    p = _snap(tmp_path, data)
    assert main(["step-debug", "--scheme", scheme, "--input", str(p), "--dt", "0.3"]) == 0
    out = capsys.readouterr().out
    stats_line, snapshot = out.split("\n", 1)
    assert snapshot == p.read_text()
    stats = json.loads(stats_line)["stats"]
    want = {"gspm": [7, 4], "a": [5, 3], "b": [3, 3]}[scheme]
    assert [stats["linear_solves_per_step"], stats["fft_executions_per_step"]] == want


def test_step_debug_matches_dense_oracle(tmp_path, capsys):
    m = oracles.random_unit((1, 1, 8), 21)
    p = _snap(tmp_path, m)
    out = tmp_path / "out.csv"
    assert main(["step-debug", "--scheme", "a", "--input", str(p), "--dt", "0.05",
                 "--alpha", "0.2", "--Q", "0.3", "--output", str(out)]) == 0
    ref, _ = oracles.scheme_a_step(m, Mesh(8, dx=1 / 8), 0.05, 1.0, 0.2, Q=0.3)
    assert np.max(np.abs(read_snapshot_csv(out).data - ref)) <= 1e-12


def test_step_debug_with_config(tmp_path, capsys):
    m = oracles.random_unit((1, 1, 8), 22)
    p = _snap(tmp_path, m)
    cfg = tmp_path / "c.cfg"
    cfg.write_text("run.scheme = gspm\nrun.dt_dimensionless = 0.01\nrun.n_steps = 1\n"
                   "dimensionless.Q = 0.2\ndimensionless.eps = 1.0\ndimensionless.alpha = 0.5\n"
                   "field.h_ext = 0.1, 0, 0\n")
    out = tmp_path / "o.csv"
    assert main(["step-debug", "--input", str(p), "--config", str(cfg), "--output", str(out)]) == 0
    ref, _ = oracles.gspm_step(m, Mesh(8, dx=1 / 8), 0.01, 1.0, 0.5, Q=0.2, h_ext=(0.1, 0, 0))
    assert np.max(np.abs(read_snapshot_csv(out).data - ref)) <= 1e-12


def test_config_errors_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("run.T = 1\nrun.n_steps = 2\n")
    p = _snap(tmp_path, oracles.random_unit((1, 1, 4), 0))
    assert main(["step-debug", "--scheme", "a", "--input", str(p), "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error:") and "run.n_steps" in err
    cfg.write_text("run.foo = 1\n")
    assert main(["profile", "--config", str(cfg)]) == 2
    assert "line 1" in capsys.readouterr().err
    assert main(["step-debug", "--scheme", "a", "--input", str(tmp_path / "missing.csv"),
                 "--dt", "0.1"]) == 2
    assert main(["step-debug", "--scheme", "a", "--input", str(p)]) == 2


def test_not_converged_is_fatal_with_strict(tmp_path, capsys):
    args = ["hysteresis", "--counts", "4", "4", "1", "--H0", "10", "--dH", "10",
            "--max-steps", "1", "--out", str(tmp_path)]
    assert main(args) == 0
    assert main(args + ["--strict"]) == 1
    assert "error:" in capsys.readouterr().err
    rows = list(csv.DictReader(open(tmp_path / "loop.csv")))
    assert len(rows) == 5 and rows[0]["converged"] == "0"


def _strip_seconds(path):
    rows = list(csv.DictReader(open(path)))
    for r in rows:
        r.pop("seconds", None)
    return rows


def test_converge_writes_table_and_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["converge", "--case", "3d", "--scheme", "a", "--vary", "time",
                     "--out", str(d)]) == 0
    rows = _strip_seconds(a / "convergence.csv")
    assert rows == _strip_seconds(b / "convergence.csv")
    assert len(rows) == 4 and all(r["slope"] for r in rows)
    report = json.loads((a / "report.json").read_text())
    assert report["tables"][0]["counts_ok"] is True


def test_stability_csv_is_byte_identical(tmp_path):
    outs = []
    for name in ("a", "b"):
        assert main(["stability", "--scheme", "b", "--nx", "16", "--steps", "30",
                     "--alphas", "0.1", "--out", str(tmp_path / name)]) == 0
        outs.append((tmp_path / name / "stability.csv").read_bytes())
    assert outs[0] == outs[1]


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("LLGSPM_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["stability", "--scheme", "a", "--nx", "8", "--steps", "5", "--alphas", "1"]) == 0
    assert (tmp_path / "env" / "stability.csv").exists()
    assert (tmp_path / "env" / "report.json").exists()


def test_profile_command(tmp_path):
    assert main(["profile", "--scheme", "a", "--alpha", "0.1", "--counts", "8", "8", "1",
                 "--final-ns", "0.01", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["result"]["steps"] == 10
    assert (tmp_path / "profile_a_alpha0.1_angle.csv").exists()
