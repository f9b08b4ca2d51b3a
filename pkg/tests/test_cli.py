import json
import subprocess
import sys

import pytest

from eqclass import cli
from eqclass.arith.expr import ratfun_from_json
from eqclass.arith.ratfun import ratfun_eq
from eqclass.detvar import y0_closed_form
from eqclass.motivic import WhitneyResult, whitney_pipeline


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_series_golden(capsys):
    assert run(capsys, "series", "todd", "6") == (0, "1, 1/2, 1/12, 0, -1/720, 0, 1/30240\n", "")
    assert run(capsys, "series", "ch", "4")[1] == "1, 1, 1/2, 1/6, 1/24\n"


@pytest.mark.parametrize("argv, expected", [
    (("integrate", "p2", "--class", "h^2"), "1"),
    (("integrate", "p2", "--class", "1"), "0"),
    (("integrate", "gr24", "--class", "1"), "0"),
    (("integrate", "builtin:p2", "--class", "h"), "0"),
    (("integrate", "p2", "--class", "h^3"), "t0+t1+t2"),
    (("integrate", "gr24", "--class", "h^4"), "2"),
])
def test_integrate_golden(capsys, argv, expected):
    assert run(capsys, *argv) == (0, expected + "\n", "")


def test_integrate_not_polynomial(capsys):
    code, _, err = run(capsys, "integrate", "p2", "--class", "h^2", "--at", "p0=0")
    assert code == 3
    assert "not polynomial" in err


@pytest.mark.parametrize("argv", [
    ("integrate", "missing.json", "--class", "1"),
    ("integrate", "p2", "--class", "1/(1-"),
    ("integrate", "p2", "--at", "p9=1", "--class", "1"),
    ("integrate", "p2", "--at", "p0"),
    ("integrate", "p2"),
    ("scenario", "det", "--n", "5"),
    ("scenario", "det", "--n", "4"),
    ("scenario", "det", "--y-mode", "q"),
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_argparse_errors():
    with pytest.raises(SystemExit) as exc:
        cli.main(["series", "sine", "3"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["series", "todd", "3", "--parallel", "0"])
    assert exc.value.code == 2


def test_bad_space_json(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"rank": 1, "dim": 1, "points": [{"label": "a", "ambient": [[0]]}]}')
    assert run(capsys, "integrate", str(f), "--class", "1")[0] == 2


def test_whitney(capsys):
    code, out, _ = run(capsys, "scenario", "whitney")
    assert code == 0
    assert out == "(1+T1*T2)/((1-T1)*(1-T2^2))  [CI-comparison: EQUAL]\n"


def test_identity_failure_exit_code(capsys, monkeypatch):
    good = whitney_pipeline()
    monkeypatch.setattr(cli, "whitney_pipeline",
                        lambda with_y=False: WhitneyResult(good.value, True, False))
    code, _, err = run(capsys, "scenario", "whitney")
    assert code == 4 and "identity check failed" in err


def test_cusp(capsys):
    code, out, _ = run(capsys, "scenario", "cusp")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 3
    assert lines[0] == "class: 1/(1-T)"
    assert lines[2] == "[CI-comparison: NOT-EQUAL]"


def test_schubert_gr24(capsys):
    code, out, _ = run(capsys, "scenario", "schubert-gr24")
    assert code == 0
    assert "{-s1,t1}: S2^2*T1^2/((S1-S2)*(1-S2*T1)*(T1-T2))" in out
    assert "{-s1,-s2} (singular):" in out
    assert out.rstrip().endswith("[y=0 closed form: EQUAL]")


def test_det_radial_n2(capsys):
    code, out, _ = run(capsys, "scenario", "det", "--n", "2", "--radial", "--positivity",
                       "--cache", "")
    assert code == 0
    assert out.splitlines() == ["T^0: 1-y", "T^1: 4*y", "T^2: -y+y^2", "[positivity: OK]"]


def test_det_n3_checks(capsys):
    code, out, _ = run(capsys, "scenario", "det", "--n", "3", "--cache", "")
    assert code == 0
    assert out.splitlines()[-2:] == ["[y=0 closed form: EQUAL]", "[y=1 closed form: EQUAL]"]


def test_json_output_round_trips(capsys):
    code, out, _ = run(capsys, "scenario", "det", "--n", "2", "--y-mode", "0", "--format", "json",
                       "--cache", "")
    assert code == 0
    first = out.splitlines()[0]
    r = ratfun_from_json(json.loads(first))
    assert ratfun_eq(r, y0_closed_form(2))


def test_motivic_builtin(capsys):
    code, out, _ = run(capsys, "motivic", "whitney")
    assert code == 0 and out == "(1+T1*T2)/((1-T1)*(1-T2^2))\n"


def test_motivic_file_and_errors(capsys, tmp_path):
    f = tmp_path / "e.json"
    f.write_text(json.dumps({"vars": ["t"], "y": True,
                             "expr": {"op": "diff", "args": [{"op": "smooth", "weights": [[1]]},
                                                             {"op": "smooth", "weights": [[1]]}]}}))
    assert run(capsys, "motivic", str(f))[1] == "0\n"
    f.write_text("{not json")
    assert run(capsys, "motivic", str(f))[0] == 2
    f.write_text(json.dumps({"vars": ["t"], "expr": {"op": "ref", "name": "x"}}))
    assert run(capsys, "motivic", str(f))[0] == 2


@pytest.mark.parametrize("argv", [
    ("integrate", "gr24", "--class", "h^4"),
    ("scenario", "det", "--n", "3", "--radial"),
])
def test_parallel_output_is_identical(capsys, argv):
    seq = run(capsys, *argv, "--cache", "")
    par = run(capsys, *argv, "--cache", "", "--parallel", "2")
    assert seq == par and seq[0] == 0


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "eqclass", "series", "todd", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "1, 1/2, 1/12\n"
