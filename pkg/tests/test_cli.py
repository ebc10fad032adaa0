import json
import subprocess
import sys

import pytest

from loopw.central import CocycleFamily
from loopw.cli import run
from loopw.core import CLW, L, TableAlgebra
from loopw.exactalg import D, LAM
from loopw.core import Element


def report(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None, out


def test_verify_algebra_passes(capsys):
    code, rep, _ = report(capsys, ["verify-algebra", "--b", "1/2", "--window", "2"])
    assert code == 0 and rep["status"] == "pass" and rep["exit_code"] == 0
    assert set(rep["verdicts"]) >= {"skew", "jacobi"}
    assert rep["config"]["b"] == "1/2"


def test_verify_algebra_broken_table(tmp_path, capsys):
    tab = TableAlgebra.from_algebra(CLW(0), 1).with_entry(L(0), L(0), Element.gen(L(0), D + 3 * LAM))
    f = tmp_path / "table.json"
    f.write_text(tab.dumps())
    code, rep, _ = report(capsys, ["verify-algebra", "--input", str(f), "--window", "1"])
    assert code == 1 and rep["status"] == "fail"


def test_verify_distribution(capsys):
    code, rep, _ = report(capsys, ["verify-distribution", "--a", "2", "--b", "1", "--x", "1", "--window", "1"])
    assert code == 1
    code, rep, _ = report(capsys, ["verify-distribution", "--a", "2", "--b", "1", "--window", "1"])
    assert code == 0 and rep["x"] == "2"
    assert {rep["verdicts"][k]["status"] for k in ("fourier", "mode_commutation")} == {"pass"}


def test_rank1_and_derivations(capsys):
    code, rep, _ = report(capsys, ["rank1", "--b", "0", "--delta", "1", "--alpha", "0", "--c", "2", "--window", "2"])
    assert code == 0 and rep["g_dimension"] == 1
    code, rep, _ = report(capsys, ["derivations", "--b", "1", "--window", "3", "--interior", "1", "--pdeg", "2", "--ldeg", "2"])
    assert code == 0 and rep["quotient_dim"] == 0


def test_central_with_family_file(tmp_path, capsys):
    f = tmp_path / "fam.json"
    f.write_text(CocycleFamily({"A": {0: 1}, "B": {1: 2}}).dumps())
    code, rep, _ = report(capsys, ["central", "--b", "1", "--window", "2", "--ldeg", "4", "--input", str(f)])
    assert code == 0 and rep["verdicts"]["family"]["status"] == "pass"
    code, rep, _ = report(capsys, ["central", "--b", "2", "--window", "2", "--ldeg", "4"])
    assert code == 1 and rep["structure_ok"] is False


def test_ext(capsys):
    code, rep, _ = report(capsys, ["ext", "--dir", "mc", "--b", "0", "--delta", "1", "--alpha", "0", "--beta", "0", "--window", "3", "--interior", "1"])
    assert code == 0 and rep["dim_ext"] == 2
    code, rep, _ = report(capsys, ["ext", "--dir", "cm", "--b", "1", "--delta", "1", "--alpha", "1", "--beta", "-1", "--window", "2", "--interior", "1"])
    assert code == 0 and rep["dim_ext"] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["verify-algebra", "--b", "0.5"],
        ["verify-algebra", "--b", "1/0"],
        ["central", "--b", "0", "--window", "1", "--interior", "2"],
        ["nope"],
        ["ext", "--dir", "xx", "--b", "0", "--delta", "1", "--alpha", "0", "--beta", "0"],
        ["rank1", "--b", "0"],
    ],
)
def test_usage_errors(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().out == ""


def test_missing_input_file_is_usage_error(tmp_path, capsys):
    assert run(["verify-algebra", "--input", str(tmp_path / "missing.json")]) == 2


def test_out_file_and_determinism(tmp_path):
    args = ["ext", "--dir", "mc", "--b", "2", "--delta", "2", "--alpha", "1", "--beta", "-1", "--window", "3", "--interior", "1"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["dim_ext"] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "loopw", "verify-algebra", "--b", "0", "--window", "1"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["command"] == "verify-algebra"
