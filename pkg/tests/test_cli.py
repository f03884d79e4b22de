"""End-to-end command line checks: exit codes, report files, determinism."""

import json

import pytest

from nchodge import cli


def run(argv, capsys=None):
    code = cli.main(argv)
    return code


def test_spectral_bundled_algebra(tmp_path):
    out = tmp_path / "report.json"
    code = run(["spectral", "--algebra", "dual_numbers.json", "--nmax", "4",
                "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["kind"] == "spectral" and rep["passed"]
    assert rep["schema"] == 1


def test_torsion_bundled_complex(tmp_path):
    import math
    out = tmp_path / "torsion.json"
    code = run(["torsion", "--complex", "circle_alpha_-1_N8.json",
                "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["log_torsion"] == pytest.approx(-math.log(2.0), abs=1e-9)


def test_nc_report_stock_name(tmp_path):
    out = tmp_path / "nc.json"
    csv = tmp_path / "nc.csv"
    code = run(["nc-report", "--algebra", "dual-numbers", "--nmax", "3",
                "--out", str(out), "--csv", str(csv)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["passed"] and rep["degree_dims"] == [2, 2, 2, 2]
    assert "matrices" in rep      # small window, included automatically
    header = csv.read_text().splitlines()[0]
    assert header == "identity,degree,exact_zero,max_abs"


def test_missing_input_is_exit_one(tmp_path, capsys):
    code = run(["torsion", "--complex", str(tmp_path / "nope.json")])
    assert code == 1
    err = capsys.readouterr().err
    payload = json.loads(err)
    assert payload["kind"] == "error"
    assert payload["code"] == "cli/InputError"


def test_bad_usage_is_exit_one():
    with pytest.raises(SystemExit) as exc:
        cli.main(["torsion"])          # missing required --complex
    assert exc.value.code == 1


def test_invariant_failure_is_exit_two_with_report(tmp_path):
    out = tmp_path / "const.json"
    code = run(["morse-scan", "--chart", "constant", "--out", str(out)])
    assert code == 2
    rep = json.loads(out.read_text())
    assert rep["passed"] is False


def test_nonintegrable_is_exit_one(capsys):
    code = run(["gv", "--omega", "x-dy", "--n", "16"])
    assert code == 1
    payload = json.loads(capsys.readouterr().err)
    assert payload["code"] == "tangential/NotIntegrable"


def test_witten_sweep_with_taus(tmp_path):
    out = tmp_path / "sweep.json"
    code = run(["witten-sweep", "--model", "circle-leaves", "--phi", "cos-h",
                "--tau", "0,1", "--tau", "5", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["taus"] == [0.0, 1.0, 5.0]
    assert rep["passed"]


def test_cli_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["witten-sweep", "--model", "circle-leaves",
                    "--phi", "random", "--seed", "9", "--tau", "0,2",
                    "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gv_custom_omega_file(tmp_path):
    import numpy as np
    from nchodge.gv import builtin_omega
    fields = builtin_omega("sin-z", 16)
    src = tmp_path / "omega.json"
    src.write_text(json.dumps({c: fields[c].tolist() for c in ("x", "y", "z")}))
    out = tmp_path / "gv.json"
    assert run(["gv", "--omega", str(src), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["omega"] == "custom" and rep["passed"]


def test_selftest_quick(tmp_path, capsys):
    out = tmp_path / "self.json"
    code = run(["selftest", "--triples", "5", "--complexes", "3",
                "--gv-grid", "16", "--out", str(out)])
    assert code == 0
    table = capsys.readouterr().out
    assert table.count("PASS") == 12
    rep = json.loads(out.read_text())
    assert rep["passed"] and len(rep["criteria"]) == 12
