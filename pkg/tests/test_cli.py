import io
import json
import subprocess
import sys

import pytest

from cubekit import cli

from cli_cases import CASES, f

FAST = [c for c in CASES if c[0] not in ("dice", "flow")]


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_subcommand_exit_codes(name, argv, code):
    got, out, err = run(argv)
    assert got == code, out
    rep = json.loads(out)
    assert rep["command"] == argv[0] and rep["ok"] == (code == 0)
    assert rep["version"] and "result" in rep
    assert err.startswith("cubekit: ")


def test_every_subcommand_has_a_case():
    assert {c[1][0] for c in CASES} == set(cli.COMMANDS)


@pytest.mark.parametrize("name,argv,code", FAST, ids=[c[0] for c in FAST])
def test_byte_reproducible(name, argv, code):
    a = run(argv + ["--parallel", "off"])[1]
    b = run(argv + ["--parallel", "on"])[1]
    c = run(argv + ["--parallel", "off"])[1]
    assert a == b == c


def test_reports_carry_content():
    rep = json.loads(run(["homology", "--input", f("boundary_square.cub")])[1])
    assert [g["text"] for _, g in sorted(rep["result"]["homology"].items())] == ["Z", "Z"]
    rep = json.loads(run(["pi", "--input", f("bz2.cub"), "--n", "1"])[1])
    assert rep["result"]["order"] == 2 and rep["result"]["group_axioms"]
    rep = json.loads(run(["kan", "--input", f("circle.cub"), "--max-dim", "2"])[1])
    assert rep["result"]["counterexample"]["n"] == 2
    rep = json.loads(run(["curvature", "--family", f("flat.met"), "--samples", "10"])[1])
    assert rep["result"]["max_abs_err"] == 0
    assert len(rep["inputs"]) == 1


@pytest.mark.parametrize("argv", [
    ["kan", "--input", "missing.cub"],
    ["kan", "--bogus"],
    ["nosuchcommand"],
    [],
    ["dice", "--rho", "4"],
    ["curvature", "--family", f("point.cub")],
    ["specseq", "--couple", f("flat.met")],
    ["pregauge", "--input", f("bz2.cub")],
])
def test_input_errors_exit_2(argv):
    code, out, _ = run(argv)
    assert code == 2
    assert json.loads(out)["ok"] is False


def test_format_error_has_position(tmp_path):
    p = tmp_path / "bad.cub"
    p.write_text("dim 0: a\ndim 1: e\nface e 1 - = a\nface e 1 + = zz\n")
    code, out, _ = run(["validate", "--input", str(p)])
    assert code == 2 and ":4:14:" in json.loads(out)["error"]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "cubekit", "homology", "--input", f("circle.cub")],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["ok"] is True
