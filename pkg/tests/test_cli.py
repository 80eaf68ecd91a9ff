import json
import shutil
import subprocess
import sys

import pytest

from twistedsl.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, default_fixture_dir, main, run_examples

STD = {"kind": "standard"}
ORTH_J = {"kind": "orthogonal", "u": ["0", "0", "1", "0"]}
MAX23 = [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["1/2", "0", "1/2", "0"], ["0", "1/2", "0", "1/2"]]


def run_cmd(tmp_path, capsys, name, obj):
    path = tmp_path / "in.json"
    path.write_text(json.dumps(obj))
    code = main([name, str(path)])
    return code, json.loads(capsys.readouterr().out)


def test_disc_algebra(tmp_path, capsys):
    code, out = run_cmd(tmp_path, capsys, "disc-algebra", {"a": "-1", "b": "-23"})
    assert code == EXIT_OK
    assert out["disc"] == 23 and out["definite"] is True


def test_classify_standard(tmp_path, capsys):
    code, out = run_cmd(tmp_path, capsys, "classify", {"algebra": {"a": "-1", "b": "-23"}, "involution": STD})
    assert code == EXIT_OK and out == {"type": "SYMPLECTIC"}


def test_classify_orthogonal(tmp_path, capsys):
    code, out = run_cmd(tmp_path, capsys, "classify", {"algebra": {"a": "-1", "b": "-23"}, "involution": ORTH_J})
    assert code == EXIT_OK and out["type"] == "ORTHOGONAL_TYPE"


def test_disc_order_and_max_sigma(tmp_path, capsys):
    obj = {"algebra": {"a": "-1", "b": "-23"}, "involution": ORTH_J, "basis": MAX23}
    code, out = run_cmd(tmp_path, capsys, "disc-order", obj)
    assert (code, out) == (EXIT_OK, {"disc": 23})
    code, out = run_cmd(tmp_path, capsys, "max-sigma-order", obj)
    assert code == EXIT_OK and out["maximal_sigma_order"] is True and out["sigma_order"] is True


def test_units(tmp_path, capsys):
    code, out = run_cmd(tmp_path, capsys, "units", {"algebra": {"a": "-1", "b": "-23"}, "basis": MAX23})
    assert code == EXIT_OK and out["count"] == 4


def test_units_indefinite_is_input_error(tmp_path, capsys):
    basis = [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]]
    code, out = run_cmd(tmp_path, capsys, "units", {"algebra": {"a": "1", "b": "-1"}, "basis": basis})
    assert code == EXIT_INPUT and out == {"error": "infinite unit group"}


def test_trace_ideal(tmp_path, capsys):
    code, out = run_cmd(tmp_path, capsys, "trace-ideal", {"algebra": {"a": "-1", "b": "-23"}, "involution": ORTH_J, "basis": MAX23})
    assert code == EXIT_OK and isinstance(out["ideal"], int)


def test_closure_of_elementary_generators(tmp_path, capsys):
    obj = {"algebra": {"a": "-1", "b": "-23"}, "involution": ORTH_J, "basis": MAX23}
    code, out = run_cmd(tmp_path, capsys, "closure", obj)
    assert code == EXIT_OK
    assert out["rank"] == 16 and out["converged"] and out["equals_Mat2_order"]


def test_closure_needs_generators(tmp_path, capsys):
    code, out = run_cmd(tmp_path, capsys, "closure", {"algebra": {"a": "-1", "b": "-23"}})
    assert code == EXIT_INPUT and "error" in out


def test_rho_on_J(tmp_path, capsys):
    zero, one = ["0"] * 4, ["1", "0", "0", "0"]
    obj = {"algebra": {"a": "-1", "b": "-7"}, "involution": {"kind": "orthogonal", "u": ["0", "0", "0", "1"]},
           "gamma": {"a": zero, "b": one, "c": [s if k else "-1" for k, s in enumerate(zero)], "d": zero}}
    code, out = run_cmd(tmp_path, capsys, "rho", obj)
    assert code == EXIT_OK and out["det"] == "1" and out["preserves_form"] is True
    assert len(out["matrix"]) == 5


def test_rho_rejects_non_member(tmp_path, capsys):
    one, zero = ["1", "0", "0", "0"], ["0"] * 4
    obj = {"algebra": {"a": "-1", "b": "-7"}, "involution": {"kind": "orthogonal", "u": ["0", "0", "0", "1"]},
           "gamma": {"a": ["2", "0", "0", "0"], "b": zero, "c": zero, "d": one}}
    code, out = run_cmd(tmp_path, capsys, "rho", obj)
    assert code == EXIT_INPUT and "error" in out


def test_qform_and_compare(tmp_path, capsys):
    H = {"a": "-1", "b": "-7"}
    code, out = run_cmd(tmp_path, capsys, "qform", {"algebra": H, "involution": {"kind": "orthogonal", "u": ["0", "0", "0", "1"]}})
    assert code == EXIT_OK and len(out["gram2"]) == 5
    code, cmp_ = run_cmd(tmp_path, capsys, "compare-forms", {"q1": out, "q2": out, "value_bound": 3, "box_bound": 2})
    assert code == EXIT_OK and cmp_["status"] != "DISTINGUISHED"


def test_compare_forms_bad_bounds(tmp_path, capsys):
    q = [[2, 0, 0, 0, 0], [0, 2, 0, 0, 0], [0, 0, 2, 0, 0], [0, 0, 0, 2, 0], [0, 0, 0, 0, 2]]
    code, out = run_cmd(tmp_path, capsys, "compare-forms", {"q1": q, "q2": q, "value_bound": "x"})
    assert code == EXIT_INPUT


def test_malformed_json_reports_position(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"a": "-1",\n "b": }')
    code = main(["disc-algebra", str(path)])
    out = json.loads(capsys.readouterr().out)
    assert code == EXIT_INPUT
    assert "line 2" in out["error"] and "column" in out["error"]


def test_missing_file(tmp_path, capsys):
    code = main(["disc-algebra", str(tmp_path / "nope.json")])
    assert code == EXIT_INPUT and "error" in json.loads(capsys.readouterr().out)


def test_stdin_input(monkeypatch, capsys):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO('{"a": "-1", "b": "-3"}'))
    assert main(["disc-algebra", "-"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["disc"] == 3


def test_examples_filter_e1(capsys):
    assert main(["examples", "--filter", "E1", "--json"]) == EXIT_OK
    recs = json.loads(capsys.readouterr().out)
    assert len(recs) == 1 and recs[0]["status"] == "PASS"
    assert recs[0]["details"] == {"disc": 23, "units_O1": 4, "units_O2": 2}


def test_examples_none_matching():
    assert run_examples("none-matching") == []


def test_examples_bad_regex(capsys):
    assert main(["examples", "--filter", "E[", "--json"]) == EXIT_INPUT


def test_examples_quick_all_pass():
    recs = run_examples(quick=True)
    assert [r.id for r in recs] == [f"E{k}" for k in range(1, 9)]
    assert all(r.status == "PASS" for r in recs), [(r.id, r.details) for r in recs if r.status != "PASS"]


def test_fixture_override_and_fail_exit(tmp_path, capsys):
    fx = tmp_path / "fx"
    shutil.copytree(default_fixture_dir(), fx)
    data = json.loads((fx / "e1_pair23.json").read_text())
    data["expected"]["disc"] = 29
    (fx / "e1_pair23.json").write_text(json.dumps(data))
    code = main(["examples", "--filter", "E1", "--json", "--fixtures", str(fx)])
    recs = json.loads(capsys.readouterr().out)
    assert code == EXIT_FAIL and recs[0]["status"] == "FAIL"
    assert "disc_O1" in recs[0]["details"]["failed_checks"]


def test_broken_fixture_does_not_abort_batch(tmp_path, capsys):
    fx = tmp_path / "fx"
    shutil.copytree(default_fixture_dir(), fx)
    data = json.loads((fx / "e2_pair3.json").read_text())
    data["algebra"] = {"a": "0", "b": "1"}
    (fx / "e2_pair3.json").write_text(json.dumps(data))
    recs = run_examples("E[12]", fx)
    assert [r.status for r in recs] == ["PASS", "FAIL"]


@pytest.mark.parametrize("args", [["examples", "--filter", "E[1-4]", "--json"], ["disc-algebra", "{fx}"]])
def test_byte_identical_runs(tmp_path, args):
    (tmp_path / "a.json").write_text('{"a": "-1", "b": "-10"}')
    argv = [a.replace("{fx}", str(tmp_path / "a.json")) for a in args]
    cmd = [sys.executable, "-m", "twistedsl.cli", *argv]
    first = subprocess.run(cmd, capture_output=True, check=True)
    second = subprocess.run(cmd, capture_output=True, check=True)
    assert first.stdout == second.stdout and first.stdout
