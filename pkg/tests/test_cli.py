import json
import subprocess
import sys

import pytest

from thompsonft.cli import dumps, run


def call(capsys, *argv):
    code = run(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_c_cubed_is_identity(capsys):
    code, out = call(capsys, "thompson", "mul", "--a", "gen:C", "--b", "gen:C", "--c", "gen:C")
    assert code == 0
    assert out["identity"] and out["num"] == "*" and out["rot"] == 0


def test_forest_compose(capsys):
    code, out = call(capsys, "forest", "compose", "--w1", "(**)", "--w2", "(**) *")
    assert out["result"] == "((**)*)"


def test_twopoint_matches_oracle(capsys):
    code, out = call(capsys, "corr", "twopoint", "--preset", "qutrit", "--x", "0",
                     "--y", "0.875", "--alpha", "beta1", "--beta", "beta1", "--m", "3")
    assert code == 0
    assert abs(out["value"][0] - out["oracle"][0]) < 1e-12
    assert out["oracle_difference"] < 1e-12


def test_global_flags_before_subcommand(capsys, tmp_path):
    target = tmp_path / "out.json"
    code = run(["--preset", "qutrit", "--out", str(target), "tensor", "verify"])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(target.read_text())["planar_perfect"] is True


def test_dyadic_output(capsys):
    code, out = call(capsys, "corr", "support", "--points", "1/7,2/3,5/6")
    assert out["partition"] == [{"k": 0, "m": 0}, {"k": 1, "m": 1}, {"k": 2, "m": 3},
                                {"k": 0, "m": 1}]
    code, out = call(capsys, "thompson", "topl", "--a", "gen:A")
    assert out["points"][1] == [{"k": 1, "m": 1}, {"k": 2, "m": 1}]


def test_module_error_is_json(capsys):
    code, out = call(capsys, "corr", "npoint", "--points", "1/3,1/3", "--alphas", "1,1")
    assert code == 1
    assert out["error"]["code"] == "support"


def test_unknown_command():
    with pytest.raises(SystemExit) as exc:
        run(["nonsense"])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv", [
    ["forest", "join", "--w1", "((**)*)", "--w2", "(*(**))"],
    ["thompson", "inv", "--a", "gen:B"],
    ["thompson", "reduce", "--num", "(((**)*)*)", "--den", "((**)(**))"],
    ["thompson", "frompl", "--points", '[["0", "0"], ["1/2", "1/4"], ["3/4", "1/2"], ["1", "1"]]'],
    ["approx", "run", "--eps", "0.05"],
    ["approx", "dist", "--element", "gen:A"],
    ["tensor", "eigen"],
    ["tensor", "fusion", "--convention", "projection"],
    ["tensor", "blob"],
    ["state", "vacuum"],
    ["state", "act", "--g", "gen:B"],
    ["state", "inner"],
    ["corr", "metric", "--x", "0.01101b", "--y", "0.01111b"],
    ["corr", "npoint", "--points", "1/8,5/8", "--alphas", "beta1,beta1"],
    ["corr", "ope"],
    ["corr", "oracle", "--m", "2", "--ops", "0:beta1,3:beta1"],
    ["corr", "covariance", "--g", "gen:A", "--points", "1/16,11/16", "--alphas", "beta1,beta2"],
    ["trivalent", "reduce", "--d", "2.5", "--b", "1.2", "--t", "0.3", "--diagram", "theta"],
    ["trivalent", "gram", "--d", "2.5", "--b", "1.2", "--t", "0.3"],
    ["trivalent", "square", "--preset", "fibonacci"],
    ["tensor", "eigen", "--preset", "fibonacci"],
])
def test_every_subcommand_runs(capsys, argv):
    code, out = call(capsys, *argv)
    assert code == 0, out
    assert "error" not in out


def test_byte_identical_output(capsys):
    argv = ["corr", "ope"]
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first


def test_float_format():
    assert dumps({"x": 0.1}) == '{"x": 0.10000000000000001}\n'
    assert json.loads(dumps({"z": 1 + 2j, "n": 3})) == {"n": 3, "z": [1.0, 2.0]}


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "thompsonft.cli", "thompson", "gen", "--name", "C"],
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["rot"] == 2
