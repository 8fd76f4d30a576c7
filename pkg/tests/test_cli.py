from __future__ import annotations

import json
import subprocess
import sys

import pytest

from lpa.cli import main

from conftest import DATA

LOOP, ROSE, EDGE, PATH3 = (str(DATA / n) for n in ("loop.g", "rose2.g", "edge.g", "path3.g"))
E12, UNIPOTENT = str(DATA / "e12.rep"), str(DATA / "unipotent.rep")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_zero_test_example(capsys):
    code, out, _ = run(capsys, "zero-test", "--graph", LOOP, "--elem", "x.x* - *", "--system", "rotation")
    assert code == 0 and out.splitlines()[0] == "zero"


def test_zero_test_nonzero_and_oracles(capsys):
    code, out, _ = run(capsys, "zero-test", "--graph", LOOP, "--elem", "x - *")
    assert code == 1
    assert out.splitlines() == [
        "nonzero",
        "syntactic: nonzero (normal form -* + x)",
        "semantic: nonzero: z=0 ↦ w=-1 + 1 r2, coeff=1",
    ]
    code, out, _ = run(capsys, "zero-test", "--graph", ROSE, "--elem", "a.a* + b.b* - v", "--oracle", "semantic")
    assert code == 0 and out.splitlines() == ["zero", "semantic: zero (2 cells, 2 groups)"]


def test_oracle_disagreement_exits_nonzero(capsys):
    # on the interval system the loop acts as the identity, so the unchecked
    # semantic test calls x - * zero while the syntactic test does not
    code, out, _ = run(capsys, "zero-test", "--graph", LOOP, "--elem", "x - *", "--system", "interval", "--unchecked")
    assert code == 1 and out.splitlines()[0] == "DISAGREE"


def test_precondition_errors(capsys):
    code, _, err = run(capsys, "zero-test", "--graph", LOOP, "--elem", "x", "--system", "interval")
    assert code == 2 and "not certified" in err
    code, _, err = run(capsys, "build-system", "--graph", EDGE, "--kind", "rotation")
    assert code == 2 and "sink v2" in err


def test_parse_and_usage_errors(capsys, tmp_path):
    assert run(capsys, "normal-form", "--graph", LOOP, "--elem", "x + q")[0] == 2
    assert run(capsys, "levels")[0] == 2
    assert run(capsys, "frobnicate", "--graph", LOOP)[0] == 2
    assert run(capsys, "levels", "--graph", str(tmp_path / "nope.g"))[0] == 2
    assert run(capsys, "apply", "--graph", LOOP, "--elem", "x", "--point", "abc")[0] == 2


def test_check_hypothesis_example(capsys):
    code, out, _ = run(capsys, "check-hypothesis", "--graph", LOOP, "--vertex", "*", "--maxlen", "4")
    assert code == 0 and out == "ok z0=0\n"
    code, out, _ = run(capsys, "check-hypothesis", "--graph", LOOP, "--system", "interval", "--maxlen", "1")
    assert code == 1 and out == "*: fail {x}\n"


def test_analyze_rep_example(capsys):
    code, out, _ = run(capsys, "analyze-rep", "--graph", EDGE, "--rep", E12)
    lines = out.splitlines()
    assert code == 0 and lines[-1] == "intertwiner verified"
    assert "R e = {m0}  f_e: m1->m0" in lines
    code, out, _ = run(capsys, "analyze-rep", "--graph", LOOP, "--rep", UNIPOTENT)
    assert code == 1 and "b2b basis not found" in out


def test_validate_graph(capsys, tmp_path):
    assert run(capsys, "validate-graph", "--graph", LOOP)[:2] == (0, "ok (1 vertices, 1 edges)\n")
    bad = tmp_path / "bad.g"
    bad.write_text("vertex v1\nedge e v1 v2\n")
    code, out, _ = run(capsys, "validate-graph", "--graph", str(bad))
    assert code == 1 and "dangling endpoint" in out


def test_levels_condition_l_build(capsys):
    code, out, _ = run(capsys, "levels", "--graph", PATH3)
    assert out.splitlines() == ["X1 = {v1, v3}  Y1 = {e1, e2}", "leftover = {v2}", "p-simple: yes"]
    assert run(capsys, "condition-l", "--graph", LOOP)[:2] == (1, "fails: cycles without exit {x}\n")
    assert run(capsys, "condition-l", "--graph", ROSE)[:2] == (0, "holds\n")
    code, out, _ = run(capsys, "build-system", "--graph", EDGE, "--kind", "interval", "--dump")
    assert code == 0
    assert out.splitlines() == ["valid interval system", "system interval", "D v1 = [0, 1)", "D v2 = [-1, 0)",
                                "R e = [0, 1)", "  f_e: [-1, 0) → 1·z + (1)"]


def test_normal_form_separating_apply(capsys):
    assert run(capsys, "normal-form", "--graph", ROSE, "--elem", "a.a* + b.b* - v")[1] == "0\n"
    assert run(capsys, "separating-path", "--graph", LOOP, "--elem", "x - *", "--maxlen", "2")[1] == "path x.x\n"
    code, out, _ = run(capsys, "separating-path", "--graph", LOOP, "--elem", "x.x* - *")
    assert code == 1
    code, out, _ = run(capsys, "apply", "--graph", LOOP, "--elem", "x", "--point", "3/4")
    assert code == 0 and out == "1*d[-5/4 + 1 r2]\n"


ALL_VERBS = [
    ["validate-graph", "--graph", LOOP],
    ["levels", "--graph", PATH3],
    ["condition-l", "--graph", ROSE],
    ["build-system", "--graph", ROSE, "--dump"],
    ["normal-form", "--graph", ROSE, "--elem", "2 a.b* - 3 v"],
    ["zero-test", "--graph", ROSE, "--elem", "a.b* - b.a*"],
    ["separating-path", "--graph", ROSE, "--elem", "a.b*", "--maxlen", "1"],
    ["check-hypothesis", "--graph", ROSE, "--maxlen", "3"],
    ["apply", "--graph", ROSE, "--elem", "a.b*", "--point", "5/4"],
    ["analyze-rep", "--graph", EDGE, "--rep", E12],
]


@pytest.mark.parametrize("argv", ALL_VERBS, ids=lambda a: a[0])
def test_json_lines_carry_the_text_report(capsys, argv):
    code, text, _ = run(capsys, *argv)
    code2, js, _ = run(capsys, *argv, "--format", "json-lines")
    assert code == code2
    recs = [json.loads(line) for line in js.splitlines()]
    assert all(r["verb"] == argv[0] for r in recs)
    assert [r["line"] for r in recs] == text.splitlines()


@pytest.mark.parametrize("argv", ALL_VERBS, ids=lambda a: a[0])
def test_reports_are_byte_stable(argv):
    cmd = [sys.executable, "-m", "lpa.cli", *argv]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True, env={"PYTHONHASHSEED": "123", "PATH": ""})
    assert a.stdout == b.stdout and a.returncode == b.returncode
