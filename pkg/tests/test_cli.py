import json
import subprocess
import sys

import pytest

from tanaka_kit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_prolong_example(capsys):
    code, out, _ = run(capsys, "prolong", "fixtures/sec3_5_fprime.json", "--kmax", "2")
    assert code == 0
    assert "dims [2, 0], total 9" in out and "expectation: match" in out


def test_deform_example_streams_trace(capsys):
    code, out, _ = run(capsys, "deform", "fixtures/sec3_5_case_i.json")
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "  [generic] trace:"
    assert "which involves no unknowns" in out and "verdict: Inconsistent" in out


def test_json_reports_are_deterministic(capsys):
    _, a, _ = run(capsys, "deform", "sec3_5_3_case_ii", "--json")
    _, b, _ = run(capsys, "deform", "sec3_5_3_case_ii", "--json")
    assert a == b
    rep = json.loads(a)
    assert rep["verdict"] == "Inconsistent" and len(rep["branches"]) == 3


def test_concurrency_does_not_change_reports(capsys, monkeypatch):
    monkeypatch.setenv("TANAKA_KIT_JOBS", "1")
    _, a, _ = run(capsys, "prolong", "sec3_5_fprime", "sec3_6_3_nonint", "--json")
    monkeypatch.setenv("TANAKA_KIT_JOBS", "2")
    _, b, _ = run(capsys, "prolong", "sec3_5_fprime", "sec3_6_3_nonint", "--json")
    assert a == b


def test_mismatch_exit_code(capsys, tmp_path):
    d = json.loads(open(__import__("tanaka_kit").fixture("sec3_5_fprime")).read())
    d["expect"]["prolong"]["total"] = 10
    p = tmp_path / "wrong.json"
    p.write_text(json.dumps(d))
    code, out, _ = run(capsys, "prolong", str(p))
    assert code == 1 and "MISMATCH total" in out


def test_malformed_json_reports_position(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "basis": [1,\n}')
    code, _, err = run(capsys, "prolong", str(p))
    assert code == 2
    assert "bad.json:3:1" in err


def test_missing_file_and_bad_values(capsys, monkeypatch):
    assert run(capsys, "curve", "no_such_curve.json")[0] == 2
    assert run(capsys, "catalog", "--segre", "(1111)", "--values", "alpha=3,beta=2")[0] == 2
    assert run(capsys, "catalog", "--segre", "(9)")[0] == 2
    monkeypatch.setenv("TANAKA_KIT_JOBS", "zero")
    assert run(capsys, "prolong", "heis3", "sec3_5_fprime")[0] == 2


def test_curve_and_tube(capsys):
    code, out, _ = run(capsys, "curve", "curve_trig", "curve_planar")
    assert code == 0 and "W = 18" in out
    code, out, _ = run(capsys, "tube", "curve_rnc", "--sections")
    assert code == 0 and "(3, 2, 1)" in out and "Y10" in out
    code, out, _ = run(capsys, "tube", "--hyperquadric", "--json")
    assert code == 0 and json.loads(out)["freeman"]["ranks"] == [3, 0, 0]


def test_catalog_symmetries(capsys):
    code, out, _ = run(capsys, "catalog", "--segre", "(1111)", "--values", "alpha=2,beta=5", "--symmetries")
    assert code == 0 and "['-12', '0', '4', '8']" in out
    code, out, _ = run(capsys, "catalog", "--json")
    assert code == 0 and len(json.loads(out)) == 12


def test_verify_paper_subset(capsys):
    code, out, _ = run(capsys, "verify-paper", "--only", "1,8")
    assert code == 0
    assert "[PASS]  1." in out and "[PASS]  8." in out and "2/2 criteria pass" in out
    assert run(capsys, "verify-paper", "--only", "12")[0] == 2


@pytest.mark.parametrize("argv", [["-m", "tanaka_kit", "--version"]])
def test_module_entry_point(argv):
    r = subprocess.run([sys.executable, *argv], capture_output=True, text=True)
    assert r.returncode == 0 and "tanaka-kit" in r.stdout


def test_deform_pin_audit(capsys):
    code, out, _ = run(capsys, "deform", "sec3_5_case_vii", "--audit-pins", "--json")
    assert code == 0
    rep = json.loads(out)
    flagged = {a["pin"]: a["outcome"] for a in rep["pin_audit"] if a["critical"]}
    assert flagged == {"[Z10,X01] -> Y = 1": "Consistent", "[Z01,X01] -> Y = 0": "Residual"}
