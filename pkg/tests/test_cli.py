import json
import subprocess
import sys

import pytest

from ncorder.cli import main
from ncorder.ncalg import NCPoly, gen, poly_from_dict


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_got_verify_worked_example(capsys):
    code, out, _ = run(capsys, "got", "verify", "--o", "time", "--oprime", "antitime", "--word", "1,2,3")
    assert code == 0
    assert "lhs: x3*x2*x1" in out
    assert "rhs: x3*x2*x1" in out
    assert "C[x1,x2] = -x1*x2 + x2*x1" in out
    assert "symbolic: PASS" in out


def test_got_verify_json(capsys):
    code, out, _ = run(capsys, "got", "verify", "--o", "time", "--oprime", "antitime", "--word", "2,1", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["equal"]
    assert poly_from_dict(doc["lhs"]) == NCPoly.word((gen("x2"), gen("x1")))


def test_got_verify_with_decomposition(capsys, tmp_path):
    f = tmp_path / "L.json"
    f.write_text(json.dumps({"A": {"1": "2/3", "2": "-1"}, "B": {"1": "5", "2": "1/2"}}))
    code, out, _ = run(capsys, "got", "verify", "--o", "alpha", "--oprime", "time", "--word", "A,B,A", "--L", str(f), "--numeric")
    assert code == 0
    assert "symbolic: PASS" in out
    assert "numeric (d=4, seed=0)" in out


@pytest.mark.parametrize(
    "doc",
    [
        {"A": {"1": "1"}},  # no row for B
        {"A": {"1": "0"}, "B": {"1": "1"}},  # empty row
        {"A": {"A": "1"}, "B": {"1": "1"}},  # shared label
        {"A": {"1": "1/0"}, "B": {"1": "1"}},
        ["A"],
    ],
)
def test_bad_decomposition(capsys, tmp_path, doc):
    f = tmp_path / "L.json"
    f.write_text(json.dumps(doc))
    code, _, err = run(capsys, "got", "verify", "--o", "alpha", "--oprime", "time", "--word", "A,B", "--L", str(f))
    assert code == 2
    assert "error" in err


def test_missing_decomposition_file(capsys, tmp_path):
    code, _, _ = run(capsys, "got", "verify", "--o", "alpha", "--oprime", "time", "--word", "A", "--L", str(tmp_path / "nope"))
    assert code == 2


def test_order(capsys):
    code, out, _ = run(capsys, "order", "--rule", "time", "--expr", "x1*x2*x3 + 2*x1*x2 - x2*x1")
    assert code == 0
    assert out.strip() == "x2*x1 + x3*x2*x1"


def test_eval_with_declaration(capsys):
    code, out, _ = run(capsys, "eval", "--declare", "P=perm:Y,X", "--expr", "P[X*Y]")
    assert (code, out.strip()) == (0, "Y*X")


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "eval", "--expr", "X * (Y")
    assert code == 2
    assert "1:7" in err


@pytest.mark.parametrize("method", ["got", "classical", "log"])
def test_bch_methods(capsys, method):
    code, out, _ = run(capsys, "bch", "--max-order", "4", "--method", method)
    assert code == 0
    assert "Z_2: 1/2*X*Y - 1/2*Y*X" in out
    assert "FAIL" not in out


def test_bch_cap(capsys):
    assert run(capsys, "bch", "--max-order", "9")[0] == 2


def test_magnus(capsys):
    code, out, _ = run(capsys, "magnus", "--steps", "3", "--max-order", "3")
    assert code == 0
    assert "check third_order_cancellation: PASS" in out
    assert run(capsys, "magnus", "--steps", "4", "--max-order", "2")[0] == 2


def test_numcheck(capsys):
    code, out, _ = run(capsys, "numcheck", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert 80 <= doc["ratio"] <= 200


def test_suite_and_mutant(capsys):
    code, out, _ = run(capsys, "suite", "--cases", "3", "--only", "gotcore")
    assert code == 0
    assert "got_identity" in out
    code, out, _ = run(capsys, "suite", "--cases", "20", "--only", "got_identity", "--mutant")
    assert code == 1
    assert "FAIL" in out


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("NCORDER_SEED", "7")
    code, out, _ = run(capsys, "suite", "--cases", "1", "--only", "jacobi", "--format", "json")
    assert json.loads(out)["seed"] == 7
    monkeypatch.setenv("NCORDER_SEED", "seven")
    assert run(capsys, "suite")[0] == 2


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "got", "verify", "--o", "chrono", "--oprime", "time", "--word", "1")[0] == 2


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "ncorder", "order", "--rule", "antitime", "--expr", "x2*x1"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0
    assert res.stdout.strip() == "x1*x2"
