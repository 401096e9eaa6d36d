import json

from ultraqs import __version__
from ultraqs.cli import main
from conftest import FIXTURES, GOLDEN


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out), out


def fx(name):
    return FIXTURES / name


def test_validate_exit_codes(capsys, tmp_path):
    code, rep, _ = run(capsys, "validate", fx("X3.json"))
    assert code == 0 and rep["verdict"] == "pass"
    code, rep, _ = run(capsys, "validate", fx("broken_triangle.json"))
    assert code == 1 and rep["verdict"] == "fail"
    w = rep["witnesses"][0]
    assert (w["code"], w["i"], w["j"], w["k"]) == ("StrongTriangleViolation", 1, 2, 0)
    code, rep, _ = run(capsys, "validate", tmp_path / "missing.json")
    assert code == 2 and rep["verdict"] == "error"
    code, rep, _ = run(capsys, "validate", fx("non_canonical.json"))
    assert code == 2 and rep["witnesses"][0]["code"] == "FormatError"


def test_report_field_order(capsys):
    _, rep, _ = run(capsys, "validate", fx("X3.json"))
    assert list(rep) == ["command", "verdict", "result", "witnesses", "timing_ms", "version"]
    assert rep["version"] == __version__


def test_tree_command(capsys, tmp_path):
    out = tmp_path / "t.json"
    code, rep, _ = run(capsys, "tree", fx("X3.json"), "--out", out)
    assert code == 0
    assert rep["result"] == json.loads(fx("tX3.json").read_text())
    assert json.loads(out.read_text()) == rep["result"]


def test_balls_command(capsys):
    code, rep, _ = run(capsys, "balls", fx("X3.json"))
    assert [b["points"] for b in rep["result"]] == [["p0"], ["p1"], ["p2"], ["p0", "p1"], ["p0", "p1", "p2"]]
    code, rep, _ = run(capsys, "balls", fx("X3.json"), "--subset", "p0,p2")
    assert code == 1 and rep["witnesses"] == [{"x": "p0", "y": "p2", "z": "p1"}]


def test_envelope_and_check(capsys):
    args = [fx("X4.json"), fx("Y4.json"), fx("map_X4_Y4.json")]
    code, rep, _ = run(capsys, "envelope", *args)
    assert rep["result"] == [{"t": "1/3", "r": "1/9"}, {"t": "1", "r": "1"}, {"t": "3", "r": "9"}]
    code, rep, _ = run(capsys, "check", *args, "--eta", "power:2")
    assert code == 0 and rep["verdict"] == "pass"
    code, rep, _ = run(capsys, "check", *args, "--eta", "linear:1")
    assert code == 1 and rep["witnesses"][0]["t"] == "3"


def test_bounds_command(capsys):
    args = [fx("X4.json"), fx("Y4.json"), fx("map_X4_Y4.json"), "--eta", "power:2"]
    code, rep, _ = run(capsys, "bounds", *args, "--A", "p0,p1", "--B", "p0,p1,p2,p3")
    r = rep["result"]["reports"][0]
    assert code == 0 and (r["lower"], r["ratio"], r["upper"]) == ("1/9", "1/9", "1/9")
    assert (r["lower_general"], r["upper_general"]) == ("1/18", "4/9")
    code, rep, _ = run(capsys, "bounds", *args, "--all-nested")
    assert code == 0 and rep["result"]["pairs"] == 5
    code, rep, _ = run(capsys, "bounds", *args, "--exhaustive-subsets")
    assert code == 0
    code, rep, _ = run(capsys, "bounds", *args[:3], "--eta", "linear:1", "--all-nested")
    assert code == 1 and rep["witnesses"][0]["code"] == "ModulusInfeasible"
    code, rep, _ = run(capsys, "bounds", *args)
    assert code == 2


def test_iso_command(capsys):
    code, rep, _ = run(capsys, "iso", fx("tX3.json"), fx("tEq3.json"))
    assert code == 1 and rep["witnesses"][0]["reason"] == "canonical codes differ"
    code, rep, _ = run(capsys, "iso", fx("tX3.json"), fx("X3_doubled.json"))
    assert code == 0
    code, rep, _ = run(capsys, "iso", fx("tX3.json"), fx("X3_doubled.json"), "--labeled")
    assert code == 1


def test_ball_preserving_command(capsys):
    code, rep, _ = run(capsys, "ball-preserving", fx("X4.json"), fx("Y4.json"), fx("map_X4_Y4.json"))
    assert code == 0
    code, rep, _ = run(capsys, "ball-preserving", fx("Eq3.json"), fx("X3.json"))
    assert code == 1 and rep["result"]["ball_preserving_found"] == 0
    code, rep, _ = run(capsys, "ball-preserving", fx("X4.json"), fx("Y4.json"))
    assert code == 0 and rep["result"]["phi_ball_preserving"]["ok"]


def test_qs_pointwise_bilipschitz_invert(capsys):
    code, rep, _ = run(capsys, "qs", fx("X3.json"), fx("metric_Q3.json"), fx("map_X3_Q3.json"))
    assert code == 1 and rep["result"] == {"one_qs": False, "image_ultrametric": False}
    code, rep, _ = run(capsys, "qs", fx("X4.json"), fx("Y4.json"), "--require-one-qs")
    assert code == 0 and rep["result"]["remark_equivalences"]
    code, rep, _ = run(capsys, "pointwise", fx("X4.json"), fx("Y4.json"), "--eta", "power:2", "--x", "p0", "--y", "p2")
    assert code == 0 and rep["result"]["lower"] == rep["result"]["upper"] == "9"
    code, rep, _ = run(capsys, "bilipschitz", fx("X4.json"), fx("X4_times2.json"), "--C", "1")
    assert code == 0 and rep["result"]["L"] == "2"
    code, rep, _ = run(capsys, "invert", "--eta", "linear:2", "--at", "3")
    assert rep["result"]["values"] == {"3": "6"}


def test_gen_command(capsys, tmp_path):
    code, rep, _ = run(capsys, "gen", "--config", fx("gen_X4.json"))
    golden = json.loads((GOLDEN / "seed7_n4_d2_labels3-1.json").read_text())
    assert code == 0 and rep["result"]["space"] == golden
    code, rep, _ = run(capsys, "gen", "--seed", 7, "--n", 4, "--depth", 2, "--labels", "3,1", "--out", tmp_path / "g.json")
    assert json.loads((tmp_path / "g.json").read_text()) == golden
    code, rep, _ = run(capsys, "gen", "--seed", 1, "--n", 3, "--depth", 0)
    assert code == 2 and rep["witnesses"][0]["code"] == "InfeasibleConfig"


def test_identical_inputs_identical_reports(capsys):
    args = ["envelope", fx("X4.json"), fx("Y4.json"), fx("map_X4_Y4.json")]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    a.pop("timing_ms"), b.pop("timing_ms")
    assert json.dumps(a) == json.dumps(b)


def test_fixture_directory_variable(capsys, monkeypatch):
    monkeypatch.setenv("ULTRAQS_FIXTURES", str(FIXTURES))
    code, _, _ = run(capsys, "validate", "X4.json")
    assert code == 0


def test_usage_errors(capsys):
    assert main(["tree"]) == 2
    assert main(["nosuch"]) == 2
    capsys.readouterr()
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"ultraqs {__version__}"
