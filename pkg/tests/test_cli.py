import csv
import io
import json
import subprocess
import sys

import pytest

from qmoney import cli


def _run(argv, capsysbinary):
    code = cli.run(argv)
    out = capsysbinary.readouterr()
    return code, out.out, out.err


def test_selftest_ok(capsysbinary):
    code, out, _ = _run(["selftest"], capsysbinary)
    rep = json.loads(out)
    assert code == 0 and rep["checks_passed"] and rep["version"]


def test_same_seed_byte_identical(capsysbinary):
    a = _run(["wiesner", "--n", "2", "--trials", "2000", "--seed", "7"], capsysbinary)[1]
    b = _run(["wiesner", "--n", "2", "--trials", "2000", "--seed", "7"], capsysbinary)[1]
    c = _run(["wiesner", "--n", "2", "--trials", "2000", "--seed", "8"], capsysbinary)[1]
    assert a == b and a != c


def test_seed_from_environment(capsysbinary, monkeypatch):
    monkeypatch.setenv("QMONEY_SEED", "7")
    a = _run(["bomb", "--trials", "500"], capsysbinary)[1]
    monkeypatch.delenv("QMONEY_SEED")
    b = _run(["bomb", "--trials", "500", "--seed", "7"], capsysbinary)[1]
    assert a == b


def test_csv_format(capsysbinary):
    code, out, _ = _run(["grover", "--n", "3", "--trials", "50", "--format", "csv"], capsysbinary)
    rows = list(csv.reader(io.StringIO(out.decode())))
    assert code == 0 and rows[0] == ["metric", "value", "ci_low", "ci_high", "trials"]
    assert {r[0] for r in rows[1:]} >= {"iterations", "success_probability"}


def test_emit_report_empty_csv_and_json():
    rep = {"config": {}, "metrics": [], "version": "x"}
    assert cli.emit_report(rep, "csv") == b"metric,value,ci_low,ci_high,trials\n"
    assert json.loads(cli.emit_report(rep, "json")) == rep


def test_twelve_significant_digits():
    rep = {"config": {}, "metrics": [{"name": "x", "value": 1 / 3, "ci_low": 0.0, "ci_high": 1.0, "trials": 3}], "version": "x"}
    assert "x,0.333333333333,0,1,3" in cli.emit_report(rep, "csv").decode()
    assert json.loads(cli.emit_report(rep, "json"))["metrics"][0]["value"] == 0.333333333333


def test_output_file(tmp_path, capsysbinary):
    path = tmp_path / "r.json"
    code, out, _ = _run(["hh", "--output", str(path)], capsysbinary)
    assert code == 0 and out == b""
    assert json.loads(path.read_text())["metrics"][0]["name"] == "bell_fidelity"


@pytest.mark.parametrize("argv", [["nope"], ["wiesner", "--bogus"], ["wiesner", "--trials", "0"], [], ["bomb", "--package", "x"]])
def test_usage_errors_exit_1(argv, capsysbinary):
    code, _, err = _run(argv, capsysbinary)
    assert code == 1 and b"error" in err


def test_clonopt_report_value(capsysbinary):
    code, out, _ = _run(["clonopt", "--trials", "2000", "--seed", "3"], capsysbinary)
    m = {r["name"]: r["value"] for r in json.loads(out)["metrics"]}
    assert code == 0 and abs(m["value"] - 0.75) < 0.01 and abs(m["both_pass"] - 0.75) < 0.05


def test_simon_table_file(tmp_path, capsysbinary):
    from qmoney.algorithms import SimonInstance
    from qmoney.rng import make_rng

    inst = SimonInstance.two_to_one(3, 0b101, make_rng(1))
    path = tmp_path / "t.txt"
    path.write_text(inst.oracle.to_text())
    code, out, _ = _run(["simon", "--table", str(path), "--trials", "5"], capsysbinary)
    assert code == 0 and json.loads(out)["metrics"][0]["value"] == 1.0


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qmoney", "selftest", "--format", "csv"], capture_output=True)
    assert r.returncode == 0 and r.stdout.startswith(b"metric,")
