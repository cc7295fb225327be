import csv
import io
import json
import subprocess
import sys

import pytest

from fockop.cli import run


def _json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    assert code == 0, out.err
    return json.loads(out.out)


def test_moments(capsys):
    doc = _json(capsys, ["moments", "--d", "1", "--m", "2", "--s", "0", "--alpha", "1", "--max-degree", "10"])
    assert set(doc) == {"config", "results", "diagnostics"}
    assert len(doc["results"]) == 11
    assert doc["diagnostics"]["passed"] and doc["diagnostics"]["max_rel_error"] < 1e-10
    assert doc["config"]["space"] == {"d": 1, "m": 2.0, "alpha": 1.0, "s": 0.0}
    assert doc["config"]["n_r"] == 60 and doc["config"]["n_theta"] == 64 and doc["config"]["tol"] == 1e-8


def test_commute(capsys):
    doc = _json(capsys, ["commute", "--f", "r^2", "--g", "z1*conj(z2)", "--d", "2", "--degree", "8"])
    rep = doc["results"][0]
    assert rep["residual"] <= 1e-8 and rep["degree"] == 8
    assert doc["diagnostics"]["commutes"] and doc["diagnostics"]["consistent"]
    doc = _json(capsys, ["commute", "--f", "r^2", "--g", "z1", "--d", "1"])
    assert doc["results"][0]["residual"] > 0.05 and not doc["diagnostics"]["commutes"]
    assert doc["config"]["degree"] == 10


def test_counterexample(capsys):
    doc = _json(capsys, ["counterexample", "--N", "8", "--m", "1", "--d", "1", "--degree", "14"])
    res = doc["results"][0]
    assert res["commutator"]["residual"] <= 1e-7 and res["offblock_mass"] > 0.1
    assert doc["diagnostics"]["commutes"] and not doc["diagnostics"]["rotation_invariant"]
    assert _json(capsys, ["counterexample"])["config"]["degree"] == 14


@pytest.mark.parametrize("argv", [
    ["kernel", "--x", "1+0.5i", "--y", "0.3-1i", "--m", "1.5", "--degree", "30"],
    ["eigenvalues", "--f", "r^2", "--max-degree", "5"],
    ["matrix", "--g", "z1", "--degree", "4"],
    ["zero-product", "--f", "r^2", "--g", "z1"],
    ["equation", "--f1", "r^2", "--f2", "1", "--g", "1", "--max-l", "3"],
    ["period-scan", "--f1", "r^2", "--f2", "r^2"],
    ["mellin-check", "--a", "1", "--b", "3", "--m", "2", "--z", "0.5,1"],
    ["scaling-check", "--g", "r^2", "--d", "2", "--n-theta", "8"],
])
def test_subcommands_run(capsys, argv):
    doc = _json(capsys, argv)
    assert doc["config"]["command"] == argv[0]
    assert doc["results"]


def test_subcommand_values(capsys):
    doc = _json(capsys, ["eigenvalues", "--f", "r^2", "--max-degree", "4"])
    assert [r["omega_re"] for r in doc["results"]] == pytest.approx([1, 2, 3, 4, 5], rel=1e-14)
    doc = _json(capsys, ["period-scan", "--f1", "r^2", "--f2", "1"])
    assert doc["diagnostics"]["shifts"] == [] and doc["diagnostics"]["shape"] == "empty"
    doc = _json(capsys, ["mellin-check", "--a", "2", "--b", "5", "--m", "1.5"])
    assert doc["diagnostics"]["passed"]
    doc = _json(capsys, ["scaling-check", "--g", "z1*conj(z1)", "--d", "1"])
    assert doc["diagnostics"]["passed"]
    doc = _json(capsys, ["kernel", "--x", "2", "--y", "1.5", "--m", "1", "--s", "0"])
    import math

    assert doc["results"][0]["value_re"] == pytest.approx(math.exp(3), rel=1e-12)


def test_csv_and_output_file(tmp_path, capsys):
    path = tmp_path / "m.csv"
    assert run(["moments", "--d", "2", "--max-degree", "2", "--format", "csv", "--output", str(path)]) == 0
    assert capsys.readouterr().out == ""
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert len(rows) == 6
    assert rows[0]["nu"] == "[0, 0]" and float(rows[0]["rel_error"]) < 1e-12
    assert run(["commute", "--f", "r^2", "--g", "z1", "--format", "csv"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert "quad.n_r" in rows[0] and float(rows[0]["residual"]) > 0.05


@pytest.mark.parametrize("argv", [
    ["nope"],
    ["commute", "--f", "r^2"],
    ["commute", "--f", "r^2", "--g", "z1", "--bogus"],
    ["commute", "--f", "r^2", "--g", "z3", "--d", "2"],
    ["commute", "--f", "r^(", "--g", "z1"],
    ["moments", "--m", "0.5"],
    ["moments", "--degree", "-1"],
    ["counterexample", "--N", "6"],
    ["eigenvalues", "--f", "z1"],
    ["kernel", "--x", "abc", "--y", "1"],
    ["moments", "--tol", "0"],
])
def test_input_errors_exit_1(capsys, argv):
    assert run(argv) == 1
    assert capsys.readouterr().err


def test_numerical_failure_exit_2(capsys):
    assert run(["eigenvalues", "--f", "exp(2*r^2)", "--method", "quadrature"]) == 2
    assert "numerical failure" in capsys.readouterr().err
    assert run(["matrix", "--g", "exp(3*r^2)", "--degree", "2"]) == 2


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("FOCKOP_THREADS", "0")
    assert run(["moments", "--max-degree", "2"]) == 1
    monkeypatch.setenv("FOCKOP_THREADS", "2")
    a = _json(capsys, ["commute", "--f", "r^2", "--g", "re(z1)", "--d", "2", "--degree", "6"])
    monkeypatch.setenv("FOCKOP_THREADS", "1")
    b = _json(capsys, ["commute", "--f", "r^2", "--g", "re(z1)", "--d", "2", "--degree", "6"])
    assert a == b


def test_warnings_recorded(capsys):
    doc = _json(capsys, ["commute", "--f", "r^2", "--g", "exp(z1)", "--degree", "6"])
    assert any("unbounded degree shift" in w for w in doc["diagnostics"]["warnings"])


def test_deterministic_bytes_subprocess(tmp_path):
    argv = [sys.executable, "-m", "fockop.cli", "commute", "--f", "r^2", "--g", "re(z1)", "--d", "2"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["results"]


def test_help_and_version(capsys):
    assert run(["--version"]) == 0
    assert run(["commute", "--help"]) == 0
    assert "--g" in capsys.readouterr().out
