"""Command-line front-end: exit codes, file formats, determinism, suites."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

import evanskit.cli as cli
from evanskit.model import WaveCheck


def _run(args):
    return CliRunner().invoke(cli.main, args)


def test_report_verdicts(tmp_path):
    out = tmp_path / "rep.json"
    r = _run(["report", "--p", "2", "--c", "0", "--out", str(out)])
    assert r.exit_code == 0
    d = json.loads(out.read_text())
    assert d["verdict"] == "UnstableRealEigenvalue"
    assert abs(d["ratio_check"] - 1.0) <= 1e-3
    assert d["params"] == {"p": 2.0}

    r = _run(["report", "--p", "1", "--c", "0"])
    assert r.exit_code == 0
    d = json.loads(r.output)
    assert d["verdict"] == "Inconclusive"
    assert abs(d["ratio_check"] - 1.0) <= 1e-3
    assert list(d) == sorted(d)


def test_report_rejects_waveless_model():
    r = _run(["report", "--model", "mtm"])
    assert r.exit_code == 1
    assert "lacks wave family" in r.output


def test_report_hypothesis_gate(monkeypatch):
    monkeypatch.setattr(cli, "verify_wave",
                        lambda *a, **k: WaveCheck(1.0, 0.0, 0.0, 0.0))
    r = _run(["report", "--p", "1", "--c", "0"])
    assert r.exit_code == 2
    d = json.loads(r.output)
    assert d["hypothesis_report"]["passed"] is False
    assert d["hypothesis_report"]["ode_residual"] == 1.0


def test_scan_csv_and_sidecar(tmp_path):
    out = tmp_path / "scan.csv"
    r = _run(["scan", "--p", "1", "--lambda-max", "3.0", "--grid-n", "13",
              "--tol", "1e-9", "--out", str(out)])
    assert r.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "lambda_re,lambda_im,D_re,D_im"
    assert len(lines) == 14
    for row in lines[1:]:
        assert len(row.split(",")) == 4
    side = json.loads((tmp_path / "scan.csv.brackets.json").read_text())
    assert side["d_inf"] == 1
    assert len(side["brackets"]) == 2
    roots = sorted(side["roots"])
    assert abs(roots[0] - np.sqrt(2.0)) <= 1e-5
    assert abs(roots[1] - np.sqrt(5.0)) <= 1e-5


def test_scan_deterministic(tmp_path):
    args = ["scan", "--p", "2", "--lambda-max", "2.0", "--grid-n", "7",
            "--tol", "1e-9"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _run(args + ["--out", str(a)]).exit_code == 0
    assert _run(args + ["--out", str(b)]).exit_code == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv.brackets.json").read_bytes() == \
        (tmp_path / "b.csv.brackets.json").read_bytes()


def test_scan_json_format():
    r = _run(["scan", "--p", "2", "--lambda-max", "2.0", "--grid-n", "7",
              "--tol", "1e-9", "--format", "json"])
    assert r.exit_code == 0
    d = json.loads(r.output)
    assert len(d["lambda"]) == 7
    assert d["roots"] == []
    assert d["d_inf"] == -1
    assert len(d["D_re"]) == 7


def test_scan_validation():
    r = _run(["scan", "--grid-n", "0"])
    assert r.exit_code == 1
    assert "grid_n" in r.output
    r = _run(["scan", "--model", "cme"])
    assert r.exit_code == 1
    assert "lacks wave family" in r.output


def test_contour_zero_free_rectangle():
    r = _run(["contour", "--rect", "3.5,4,-0.2,0.2", "--c", "0"])
    assert r.exit_code == 0
    d = json.loads(r.output)
    assert d["winding"] == 0
    assert d["rect"] == [3.5, 4.0, -0.2, 0.2]


def test_contour_numerical_failures():
    r = _run(["contour", "--rect", "-0.5,0.5,2,3"])
    assert r.exit_code == 3
    assert "ContourOnSpectrum" in r.output
    r = _run(["contour", "--rect", "0.1,0.2"])
    assert r.exit_code == 1
    r = _run(["contour"])
    assert r.exit_code == 1
    assert "rect" in r.output


def test_config_file_merge_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "model": "coupled-wave", "params": {"p": 2.0}, "c": 0.0,
        "numerics": {"tol": 1e-9}, "lambda_max": 2.0, "format": "json"}))
    r = _run(["scan", "--config", str(cfg), "--grid-n", "7"])
    assert r.exit_code == 0
    d = json.loads(r.output)
    assert len(d["lambda"]) == 7
    assert d["lambda"][-1] == 2.0
    assert d["roots"] == []

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"model": "coupled-wave", "bogus": 1}))
    r = _run(["report", "--config", str(bad)])
    assert r.exit_code == 1
    assert "bogus" in r.output


def test_config_validation_messages():
    r = _run(["report", "--c", "1.5"])
    assert r.exit_code == 1 and "c:" in r.output
    r = _run(["report", "--tol", "-1"])
    assert r.exit_code == 1 and "numerics.tol" in r.output
    r = _run(["report", "--model", "nosuch"])
    assert r.exit_code == 1 and "model" in r.output
    r = _run(["verify", "--suite", "nosuch"])
    assert r.exit_code == 1 and "suite" in r.output
    r = _run(["verify"])
    assert r.exit_code == 1 and "suite" in r.output


def test_verify_exact_suites():
    r = _run(["verify", "--suite", "clifford"])
    assert r.exit_code == 0
    d = json.loads(r.output)
    assert d["passed"] is True
    assert len(d["checks"]) == 4

    r = _run(["verify", "--suite", "theorem22", "--seeds", "3"])
    assert r.exit_code == 0
    d = json.loads(r.output)
    assert d["passed"] is True
    assert len(d["checks"]) == 9


def test_verify_structure_and_appendix():
    r = _run(["verify", "--suite", "structure", "--c", "0.3"])
    assert r.exit_code == 0
    assert json.loads(r.output)["passed"] is True

    r = _run(["verify", "--suite", "appendix-a", "--c", "0.3"])
    assert r.exit_code == 0
    d = json.loads(r.output)
    assert d["passed"] is True
    names = [c["name"] for c in d["checks"]]
    assert "eta-pair-identity" in names
    assert "wedge-det-proportionality" in names


def test_verify_shape_constancy_fails():
    # the determinant's normalization factors vary along the real axis, so
    # the ratio against lam^2 * quintic drifts far beyond the 1e-4 target
    r = _run(["verify", "--suite", "exact-evans", "--p", "1"])
    assert r.exit_code == 2
    d = json.loads(r.output)
    assert d["passed"] is False
    drift = float(d["checks"][0]["detail"].split()[2])
    assert drift > 1e-4
