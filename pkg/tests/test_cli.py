import io
import math
import subprocess
import sys

import pytest

from slq.cli import run

from _helpers import PROBLEMS


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_eig_free():
    code, out, _ = call("eig", "--problem", PROBLEMS / "free.slq", "--span", 0, 1, "--count", 3)
    assert code == 0
    lams = [float(line.split("lambda=")[1].split()[0]) for line in out.splitlines()]
    assert lams == pytest.approx([(k * math.pi) ** 2 for k in (1, 2, 3)], rel=1e-7)


def test_eig_csv_header():
    code, out, _ = call("eig", "--problem", PROBLEMS / "delta.slq", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "k,lambda,residual,bracket_lo,bracket_hi"


def test_check_quartic_violated_is_success():
    code, out, _ = call("check", "--problem", PROBLEMS / "p_quartic.slq", "--criterion", "hr")
    assert code == 0
    assert "verdict: violated" in out


@pytest.mark.parametrize("criterion", ["hr", "clark", "thmB"])
def test_check_csv_header(criterion):
    code, out, _ = call("check", "--problem", PROBLEMS / "p_quadratic.slq", "--criterion", criterion, "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "criterion,verdict,label,value"


def test_check_theorem_c():
    args = ["check", "--problem", PROBLEMS / "free.slq", "--criterion", "thmC"]
    code, out, _ = call(*args, "--intervals", PROBLEMS / "intervals_unit.csv")
    assert code == 0 and "C_star = 1" in out
    code, _, err = call(*args)
    assert code == 2 and "--intervals" in err


def test_missing_value_is_usage_error():
    code, _, err = call("eig", "--count")
    assert code == 2 and "usage" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["eig", "--problem", "x.slq", "--count", "three"],
        ["frobnicate", "--problem", "x.slq"],
        ["eig", "--problem", "x.slq", "--bogus", "1"],
        ["eig"],
        [],
    ],
)
def test_usage_errors(argv):
    assert call(*argv)[0] == 2


def test_missing_file():
    code, _, err = call("eig", "--problem", "does_not_exist.slq")
    assert code == 1 and "does_not_exist" in err


def test_malformed_problem(tmp_path):
    bad = tmp_path / "bad.slq"
    bad.write_text("domain 0 1\np 1 +\n")
    code, _, err = call("validate", "--problem", bad)
    assert code == 1 and "line 2" in err


def test_solve_csv_and_output_file(tmp_path):
    out_path = tmp_path / "traj.csv"
    code, out, _ = call("solve", "--problem", PROBLEMS / "delta.slq", "--format", "csv", "--output", out_path)
    assert code == 0 and out == ""
    lines = out_path.read_text().splitlines()
    assert lines[0] == "x,re_u,im_u,re_u1,im_u1"
    assert lines[-1].split(",")[:2] == ["1", "3.5"]


def test_solve_init_and_forcing():
    code, out, _ = call("solve", "--problem", PROBLEMS / "free.slq", "--init", 0, 0, "--forcing", "1", "--format", "csv")
    assert code == 0
    assert out.splitlines()[-1].split(",")[:2] == ["1", "-0.5"]


def test_bracket():
    code, out, _ = call("bracket", "--problem", PROBLEMS / "free.slq", "--points", 0.3, 0.9, "--format", "csv")
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "t,re_bracket,im_bracket"
    assert rows[1] == "0.3,1,0"


def test_form():
    code, out, _ = call("form", "--problem", PROBLEMS / "delta.slq", "--u", "sin(pi*x)", "--du", "pi*cos(pi*x)",
                        "--support", 0, 1, "--format", "csv")
    assert code == 0
    form, norm, quot = map(float, out.splitlines()[1].split(","))
    assert form == pytest.approx(math.pi ** 2 / 2 + 10, rel=1e-11)
    assert norm == pytest.approx(0.5)


def test_form_bad_derivative():
    code, _, err = call("form", "--problem", PROBLEMS / "free.slq", "--u", "sin(pi*x)", "--du", "cos(pi*x)",
                        "--support", 0, 1)
    assert code == 1 and "derivative" in err


def test_probe():
    code, out, _ = call("probe", "--problem", PROBLEMS / "shifted.slq", "--lambda", 0)
    assert code == 0 and "consistent-with-self-adjoint" in out


def test_rho():
    code, out, _ = call("rho", "--problem", PROBLEMS / "p_quadratic.slq", "--points", 5, "--format", "csv")
    assert code == 0
    assert float(out.splitlines()[1].split(",")[1]) == pytest.approx(math.asinh(5), abs=1e-10)


def test_validate():
    code, out, _ = call("validate", "--problem", PROBLEMS / "delta.slq")
    assert code == 0 and "verdict: satisfied" in out


def test_eig_help_mentions_dirichlet():
    proc = subprocess.run([sys.executable, "-m", "slq.cli", "eig", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "Dirichlet" in proc.stdout


def test_deterministic():
    argv = ["check", "--problem", PROBLEMS / "p_quadratic.slq", "--criterion", "clark", "--format", "csv"]
    assert call(*argv) == call(*argv)


def test_entry_point():
    proc = subprocess.run(["slq", "eig", "--problem", str(PROBLEMS / "free.slq"), "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    k, lam = proc.stdout.splitlines()[1].split(",")[:2]
    assert k == "1" and float(lam) == pytest.approx(math.pi ** 2, rel=1e-9)
