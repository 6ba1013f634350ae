import csv
import io
import json
import math
import subprocess
import sys

import pytest

from qubit_coexistence.cli import EXIT_INPUT, EXIT_NO, EXIT_OK, main, scan_rows

P = '{"coeffs": [0.5, 0.5, 0, 0]}'
Q = '{"coeffs": [0.5, 0, 0.5, 0]}'
SOFT_P = '{"coeffs": [0.5, 0.25, 0, 0]}'
SOFT_Q = '{"coeffs": [0.5, 0, 0.25, 0]}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- check --------------------------------------------------------------------


def test_check_orthogonal_projections(capsys):
    code, out, _ = run(capsys, "check", "--e", P, "--f", Q)
    assert code == EXIT_NO
    data = json.loads(out)
    assert data["verdict"] is False
    assert data["lhs55"] == pytest.approx(0.125) and data["rhs55"] == 0.0
    assert data["oracle"]["feasible"] is False


def test_check_coexistent_pair(capsys):
    code, out, err = run(capsys, "check", "--e", SOFT_P, "--f", SOFT_Q)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["verdict"] is True and data["oracle"]["feasible"] is True
    assert err == ""


def test_check_commuting_route(capsys):
    e = '{"coeffs": [0.5, 0.3, 0, 0]}'
    f = '{"coeffs": [0.4, -0.1, 0, 0]}'
    code, out, _ = run(capsys, "check", "--e", e, "--f", f, "--no-oracle")
    data = json.loads(out)
    assert code == EXIT_OK and data["route"] == "trivial_commuting" and "oracle" not in data


@pytest.mark.parametrize(
    "e",
    ['{"coeffs": [0.6, 0.5, 0, 0]}', "{not json", '{"coeffs": [0.5, 0, 0]}', "@/nonexistent/file.json"],
    ids=["not-effect", "malformed", "short", "missing-file"],
)
def test_check_bad_input(capsys, e):
    code, out, err = run(capsys, "check", "--e", e, "--f", Q)
    assert code == EXIT_INPUT and out == "" and err


def test_check_reads_files(capsys, tmp_path):
    (tmp_path / "e.json").write_text(P)
    code, out, _ = run(capsys, "check", "--e", f"@{tmp_path / 'e.json'}", "--f", Q, "--no-oracle")
    assert code == EXIT_NO and json.loads(out)["e"]["coeffs"] == [0.5, 0.5, 0.0, 0.0]


def test_tolerance_from_environment(capsys, monkeypatch):
    # an effect off by 1e-6 passes only with a looser tolerance
    e = '{"coeffs": [0.5, 0.500001, 0, 0]}'
    assert run(capsys, "check", "--e", e, "--f", Q, "--no-oracle")[0] == EXIT_INPUT
    monkeypatch.setenv("COEXIST_TOL", "1e-5")
    code, out, _ = run(capsys, "check", "--e", e, "--f", Q, "--no-oracle")
    assert code == EXIT_NO and json.loads(out)["tol"] == 1e-5
    monkeypatch.setenv("COEXIST_TOL", "abc")
    assert run(capsys, "check", "--e", e, "--f", Q)[0] == EXIT_INPUT


# -- construct ------------------------------------------------------------------


def test_construct_comparable(capsys):
    e = '{"coeffs": [0.3, 0.1, 0, 0]}'
    f = '{"coeffs": [0.6, 0.1, 0.1, 0]}'
    code, out, _ = run(capsys, "construct", "--e", e, "--f", f)
    data = json.loads(out)
    assert code == EXIT_OK and data["coexistent"] is True
    assert data["joint"]["a"] == [0.3, 0.1, 0.0, 0.0]
    assert data["joint"]["effects"][1] == [0.0, 0.0, 0.0, 0.0]
    assert data["verification"]["ok"] is True


def test_construct_commuting(capsys):
    e = '{"coeffs": [0.5, 0.3, 0, 0]}'
    f = '{"coeffs": [0.4, -0.1, 0, 0]}'
    code, out, _ = run(capsys, "construct", "--e", e, "--f", f)
    assert code == EXIT_OK and json.loads(out)["joint"]["route"] == "trivial_commuting"


def test_construct_main_route_with_policy(capsys):
    for policy in ("geometric", "lo", "hi", "quantile=0.3"):
        code, out, _ = run(capsys, "construct", "--e", SOFT_P, "--f", SOFT_Q, "--lambda-policy", policy)
        data = json.loads(out)
        assert code == EXIT_OK and data["joint"]["route"] == "main_criterion"
        assert data["verification"]["ok"]
    assert run(capsys, "construct", "--e", SOFT_P, "--f", SOFT_Q, "--lambda-policy", "bogus")[0] == EXIT_INPUT


def test_construct_not_coexistent(capsys):
    code, out, err = run(capsys, "construct", "--e", P, "--f", Q)
    data = json.loads(out)
    assert code == EXIT_NO and data["coexistent"] is False
    assert data["gap"] > 0 and data["segments"]["lamA_minus"] > data["segments"]["lamB_plus"]
    assert "not coexistent" in err


# -- sample ---------------------------------------------------------------------


def test_sample_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "sample", "--n", "300", "--seed", "7", "--out", str(path))[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert data["disagreements"] == 0
    assert sum(data["route_counts"].values()) == 300
    assert data["agreement"]["thm3"]["oracle"]["disagree"] == 0
    assert data["criteria"] == ["thm3", "cor1", "thm4", "yu", "oracle"]


def test_sample_samplers_without_oracle(capsys):
    for sampler in ("uniform", "boundary", "mixed"):
        code, out, _ = run(capsys, "sample", "--n", "2000", "--sampler", sampler, "--no-oracle")
        data = json.loads(out)
        assert code == EXIT_OK and "oracle" not in data["criteria"] and data["oracle_band"] is None


def test_sample_disagreement_file_has_header_only(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    assert run(capsys, "sample", "--n", "200", "--disagreements", str(path), "--no-oracle")[0] == EXIT_OK
    rows = list(csv.reader(path.open()))
    assert rows == [["index", "criterion_a", "criterion_b", "margin55",
                     "e0", "e1", "e2", "e3", "f0", "f1", "f2", "f3"]]


def test_sample_rejects_bad_n(capsys):
    assert run(capsys, "sample", "--n", "0")[0] == EXIT_INPUT


# -- scan -----------------------------------------------------------------------


def test_scan_unbiased_boundary(capsys):
    r = 1 / math.sqrt(2)
    code, out, _ = run(capsys, "scan", "--resolution", "2", "--r-min", str(r), "--r-max", str(r))
    rows = list(csv.reader(io.StringIO(out)))
    assert code == EXIT_OK and rows[0] == ["r_e", "r_f", "angle_rad", "verdict", "margin60"]
    assert len(rows) == 5
    assert all(row[3] == "1" and abs(float(row[4])) <= 1e-15 for row in rows[1:])


def test_scan_rows_cross_boundary():
    rows = list(scan_rows("unbiased_boundary", 11, [math.pi / 2]))
    body = rows[1:]
    assert len(body) == 121
    for r_e, r_f, _, verdict, _ in body:
        if abs(r_e**2 + r_f**2 - 1) > 1e-9:
            assert verdict == int(r_e**2 + r_f**2 < 1)


def test_scan_margin_grid(capsys, tmp_path):
    path = tmp_path / "grid.csv"
    code = main(["scan", "--mode", "margin_grid", "--resolution", "5", "--bias-e", "0.2",
                 "--angle", "0", "--angle", "1.0", "--out", str(path)])
    assert code == EXIT_OK
    rows = list(csv.reader(path.open()))
    assert rows[0][:6] == ["r_e", "r_f", "angle_rad", "bias_e", "bias_f", "route"]
    assert len(rows) == 1 + 2 * 25
    # angle 0 gives commuting pairs
    assert {row[5] for row in rows[1:26]} <= {"trivial_commuting", "trivial_comparable"}


@pytest.mark.parametrize(
    "argv",
    [
        ["--resolution", "1"],
        ["--r-max", "1.5"],
        ["--mode", "margin_grid", "--bias-e", "0.5", "--r-max", "0.8"],
        ["--out", "/nonexistent/dir/x.csv", "--resolution", "2"],
    ],
    ids=["resolution", "radius", "radius-vs-bias", "unwritable"],
)
def test_scan_errors(capsys, argv):
    assert run(capsys, "scan", *argv)[0] == EXIT_INPUT


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qubit_coexistence", "check", "--e", P, "--f", Q, "--no-oracle"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == EXIT_NO
    assert json.loads(proc.stdout)["verdict"] is False


def test_scan_trivial_and_parallel_rows():
    rows = list(scan_rows("unbiased_boundary", 11, [math.pi / 2]))[1:]
    assert [r[3] for r in rows if r[0] == 1.0 and r[1] == 0.0] == [1]
    parallel = list(scan_rows("unbiased_boundary", 21, [0.0]))[1:]
    assert all(r[3] == 1 for r in parallel)
