import csv
import json
import os

import pytest

from liyau import cli
from liyau.report import read_json, render_summary


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_example(tmp_path, capsys):
    code, out, _ = run(["eval", "--estimate", "davies_beta", "--beta", "0.5", "--t", "1",
                        "--n", "2", "--k", "1", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert "3.0" in out
    rep = read_json(tmp_path / "eval.json")
    assert rep["results"][0]["outputs"]["bound"] == 3.0
    assert set(rep) == {"schema_version", "command", "config_echo", "results", "provenance"}
    assert rep["provenance"]["wall_time"] is None


def test_verify_example(tmp_path, capsys):
    code, _, _ = run(["verify", "--model", "hyperbolic3", "--c", "1", "--estimate", "cor14",
                      "--beta", "0.5", "--r-max", "20", "--t-min", "0.05", "--t-max", "5",
                      "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = read_json(tmp_path / "report.json")
    assert rep["results"][0]["outputs"]["max_violation"] <= 1e-9


def test_compare_example(tmp_path, capsys):
    code, out, _ = run(["compare", "--a", "cor14", "--b", "davies_beta", "--t-min", "0.01",
                        "--t-max", "100", "--out", str(tmp_path)], capsys)
    assert code == 0 and "a <= b everywhere" in out
    with open(tmp_path / "compare.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "beta", "diff"] and len(rows) == 1 + 100 * 100
    assert all(float(r[2]) <= 0 for r in rows[1:])
    raw = (tmp_path / "compare.csv").read_bytes()
    assert b"\r" not in raw


def test_violation_exit_code(tmp_path, capsys):
    code, _, err = run(["verify", "--n", "2", "--estimate", "davies_beta", "--beta", "0.9999",
                        "--rhs-scale", "0.999", "--out", str(tmp_path)], capsys)
    assert code == 1 and "r=0" in err


def test_usage_exit_codes(tmp_path, capsys):
    assert run(["eval", "--bogus"], capsys)[0] == 2
    assert run([], capsys)[0] == 2
    assert run(["eval", "--estimate", "davies_beta", "--beta", "1.5", "--out", str(tmp_path)],
               capsys)[0] == 2
    assert run(["eval", "--out", str(tmp_path)], capsys)[0] == 2
    assert run(["eval", "--estimate", "not_an_id"], capsys)[0] == 2
    assert run(["--help"], capsys)[0] == 0


def test_numerical_exit_code(tmp_path, capsys):
    code, _, err = run(["simulate", "--initial", "bump", "--width", "0.1", "--floor", "1e-12",
                        "--R", "4", "--nr", "401", "--dt", "0.01", "--t-end", "0.2",
                        "--out", str(tmp_path)], capsys)
    assert code == 3 and "positivity" in err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"estimate": "davies_beta", "beta": 0.5, "n": 2, "k": 1, "t": [1.0]}))
    code, _, _ = run(["eval", "--config", str(cfg), "--out", str(tmp_path / "a")], capsys)
    assert code == 0
    assert read_json(tmp_path / "a" / "eval.json")["results"][0]["outputs"]["bound"] == 3.0
    code, _, _ = run(["eval", "--config", str(cfg), "--beta", "0.25", "--out", str(tmp_path / "b")],
                     capsys)
    rep = read_json(tmp_path / "b" / "eval.json")
    assert rep["config_echo"]["beta"] == 0.25
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    assert run(["eval", "--config", str(bad)], capsys)[0] == 2


def test_threads_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("LIYAU_THREADS", "3")
    run(["eval", "--estimate", "hamilton", "--out", str(tmp_path)], capsys)
    assert read_json(tmp_path / "report.json")["config_echo"]["threads"] == 3
    monkeypatch.setenv("LIYAU_THREADS", "x")
    assert run(["eval", "--estimate", "hamilton", "--out", str(tmp_path)], capsys)[0] == 2


def test_summary_round_trip(tmp_path, capsys):
    code, out, _ = run(["optimize", "--which", "phi1", "--beta0", "0.5", "--t", "1", "0.25",
                        "--out", str(tmp_path)], capsys)
    assert code == 0
    code, shown, _ = run(["show", str(tmp_path / "report.json")], capsys)
    assert shown == out
    assert render_summary(read_json(tmp_path / "report.json")) == out


def test_simulate_with_monitor_and_dump(tmp_path, capsys):
    code, out, _ = run(["simulate", "--model", "hyperbolic3", "--initial", "bump", "--estimate",
                        "cor14", "--beta", "0.5", "--dump-csv", "--out", str(tmp_path)], capsys)
    assert code == 0 and "kernel-matched run" in out
    rec = read_json(tmp_path / "report.json")["results"][1]
    assert rec["outputs"]["passed"] and rec["tolerances"]["eps_disc"] > 0
    with open(tmp_path / "snapshots.csv", newline="") as fh:
        header = next(csv.reader(fh))
    assert header == ["t", "r", "u"]


def test_timing_flag(tmp_path, capsys):
    run(["eval", "--estimate", "hamilton", "--timing", "--out", str(tmp_path)], capsys)
    assert read_json(tmp_path / "report.json")["provenance"]["wall_time"] >= 0
