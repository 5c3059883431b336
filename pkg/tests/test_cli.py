import json
import subprocess
import sys

import pytest

from crrigid import cli


H_X2 = {"form": {"n": 1, "k": 2, "components": [{"terms": [{"hol": [2], "antihol": [0], "re": "1/1", "im": "0/1"}]}]}}


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _report(tmp_path, argv, capsys):
    path = tmp_path / "r.json"
    code, _, err = _run(argv + ["--output", str(path)], capsys)
    assert code == 0, err
    return json.loads(path.read_text())


def _strip_timings(report):
    report = dict(report)
    report.pop("timings")
    return report


def test_check_grassmannian_22(tmp_path, capsys):
    rep = _report(tmp_path, ["check-grassmannian", "--n", "2", "--p", "2"], capsys)
    (v,) = rep["result"]["verdicts"]
    assert v["status"] == "RIGID" and v["matches_reference"] is True
    assert rep["version"] and rep["request"]["command"] == "check-grassmannian"
    assert {s["name"] for s in rep["systems"]} == {"gamma", "s1", "gamma_mod_s1"}


def test_check_whitney(tmp_path, capsys):
    rep = _report(tmp_path, ["check-whitney", "--n", "3"], capsys)
    assert rep["result"]["pullback_identity"] is True


def test_check_bochner_single_variable_with_witness(tmp_path, capsys):
    inp = tmp_path / "h.json"
    inp.write_text(json.dumps(H_X2))
    rep = _report(tmp_path, ["check-bochner", "--input", str(inp), "--emit-witness"], capsys)
    (v,) = rep["result"]["verdicts"]
    assert v["status"] == "NOT_RIGID" and v["witness"] is not None
    assert cli.verify_report_witnesses(rep)


def test_witness_off_by_default(tmp_path, capsys):
    inp = tmp_path / "h.json"
    inp.write_text(json.dumps(H_X2))
    rep = _report(tmp_path, ["check-bochner", "--input", str(inp)], capsys)
    assert rep["result"]["verdicts"][0]["witness"] is None


def test_determinism_and_replay(tmp_path, capsys):
    argv = ["check-bochner", "--catalog", "plucker", "--n", "2", "--p", "2", "--point", "random", "--seed", "3"]
    a = _report(tmp_path, argv, capsys)
    b = _report(tmp_path, argv, capsys)
    assert json.dumps(_strip_timings(a), sort_keys=True) == json.dumps(_strip_timings(b), sort_keys=True)
    saved = tmp_path / "saved.json"
    saved.write_text(json.dumps(a))
    out = tmp_path / "replayed.json"
    assert cli.main(["replay", str(saved), "--output", str(out)]) == 0
    assert _strip_timings(json.loads(out.read_text())) == _strip_timings(a)


@pytest.mark.parametrize(
    "argv",
    [
        ["check-weyl", "--diagonal", "1,2,-3,0,0"],
        ["fundamental-forms", "--catalog", "plucker", "--n", "3", "--p", "2"],
        ["lemma1", "--catalog", "plucker", "--n", "2", "--p", "2"],
        ["bochner-flat", "--catalog", "iwatani_normal", "--n", "3"],
        ["iwatani", "--catalog", "iwatani_normal", "--n", "4"],
    ],
)
def test_other_commands_succeed(argv, tmp_path, capsys):
    rep = _report(tmp_path, argv, capsys)
    res = rep["result"]
    if argv[0] == "check-weyl":
        assert res["verdicts"][0]["status"] == "RIGID"
    if argv[0] == "fundamental-forms":
        assert res["flag"]["type_numbers"] == [3] and "F2" in res["forms"]
    if argv[0] == "lemma1":
        assert res["lemma1"]["solution_dim"] == 0
    if argv[0] == "bochner-flat":
        assert res["bochner_flat"] is True
    if argv[0] == "iwatani":
        assert res["iwatani"] == {"ok": True, "r_squared": "1/1"}


def test_summary_is_rendered_from_report(capsys):
    code, out, _ = _run(["check-grassmannian", "--n", "2", "--p", "2"], capsys)
    assert code == 0 and "F2: RIGID" in out and "matches reference" in out
    code, out, _ = _run(["check-whitney", "--n", "2", "--json"], capsys)
    assert json.loads(out)["result"]["pullback_identity"] is True


@pytest.mark.parametrize(
    "payload,needle",
    [
        ({"form": {"n": 1}}, "input.form"),
        ({"form": {"n": 1, "k": 2, "components": [{"terms": [{"hol": [1, 1], "re": "1"}]}]}}, "components[0]"),
        ({"nothing": 1}, "input.form: missing"),
    ],
)
def test_input_errors_exit_1_with_paths(payload, needle, tmp_path, capsys):
    inp = tmp_path / "bad.json"
    inp.write_text(json.dumps(payload))
    code, _, err = _run(["check-bochner", "--input", str(inp)], capsys)
    assert code == 1 and needle in err


def test_input_source_rules(tmp_path, capsys):
    inp = tmp_path / "h.json"
    inp.write_text(json.dumps(H_X2))
    code, _, err = _run(["check-bochner", "--input", str(inp), "--catalog", "linear", "--d", "2"], capsys)
    assert code == 1 and "exactly one" in err
    code, _, _ = _run(["check-bochner"], capsys)
    assert code == 1
    code, _, err = _run(["check-bochner", "--catalog", "plucker", "--n", "2", "--p", "3"], capsys)
    assert code == 1 and "catalog" in err
    code, _, err = _run(["check-bochner", "--catalog", "whitney_ball", "--n", "2"], capsys)
    assert code == 1 and "point" in err
    inp.write_text("{not json")
    code, _, _ = _run(["check-bochner", "--input", str(inp)], capsys)
    assert code == 1


def test_internal_error_exit_2(monkeypatch, capsys):
    def boom(req, out):
        raise RuntimeError("kaboom")

    monkeypatch.setitem(cli._HANDLERS, "check-whitney", boom)
    code, _, err = _run(["check-whitney", "--n", "2"], capsys)
    assert code == 2 and "kaboom" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "crrigid", "check-whitney", "--n", "1", "--json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["pullback_identity"] is True
