import csv
import io
import json
import subprocess
import sys

import pytest

from sglattice.cli import main
from sglattice.julia import julia_cloud


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_lattice_export(capsys, tmp_path):
    code, out, err = run(capsys, "lattice", "--word", "tail=const:0", "--level", "3")
    assert code == 0 and len(json.loads(out)["vertices"]) == 42
    path = tmp_path / "g.json"
    code, _, err = run(capsys, "lattice", "--word", "tail=periodic:01", "--level", "2", "--out", str(path))
    assert code == 0 and "boundary: none" in err
    assert len(json.loads(path.read_text())["vertices"]) == 15


def test_lattice_insufficient_word(capsys):
    code, _, err = run(capsys, "lattice", "--word", "prefix=0", "--level", "3")
    assert code == 2 and err.count("insufficient word") == 1


def test_usage_errors(capsys):
    assert run(capsys, "classify")[0] == 2
    assert run(capsys, "classify", "--lambda", "x+")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "eigenfunction", "--series", "6", "--m", "1", "--branch", "-")[0] == 2


def test_classify_table(capsys):
    code, out, _ = run(capsys, "classify", "--lambda", "4,6,0", "--space", "1,2", "--boundary", "true")
    assert code == 0
    got = {(r["lambda"], r["space"]): (r["verdict"], r["series"]) for r in rows(out)}
    assert got[("4", "1")] == ("residual", "Σ4")
    assert got[("6", "2")] == ("point", "Σ6")
    assert got[("0", "2")] == ("continuous", "exceptional")
    assert got[("0", "1")] == ("residual", "exceptional")


def test_classify_c0_json(capsys):
    code, out, _ = run(capsys, "classify", "--lambda", "6", "--space", "c0", "--boundary", "false", "--format", "json")
    assert code == 0 and json.loads(out)[0]["verdict"] == "point"


def test_classify_flags_undecided(capsys):
    lam = repr(float(julia_cloud(16, 4).values[999]))
    code, out, err = run(capsys, "classify", "--lambda", lam, "--space", "2", "--backend", "float")
    assert code == 0 and "2 rows with undecided membership" in err
    assert rows(out)[0]["verdict"] == "indeterminate"


def test_julia_cloud_and_sigma(capsys):
    code, out, _ = run(capsys, "julia-cloud", "--depth", "2")
    assert code == 0 and len(rows(out)) == 4
    code, out, _ = run(capsys, "sigma", "--series", "6", "--depth", "2")
    assert code == 0 and {r["value"] for r in rows(out)} >= {"6", "3"}


def test_dimension(capsys):
    code, out, _ = run(capsys, "dimension", "--depth", "10")
    assert code == 0 and json.loads(out)["dimension"] == pytest.approx(0.54022, abs=1e-4)


def test_pm_product(capsys):
    code, out, _ = run(capsys, "pm-product", "--lambda", "3", "--m", "1")
    assert code == 0 and rows(out)[0]["P_m"] == "-3/2"
    assert run(capsys, "pm-product", "--lambda", "5", "--m", "1")[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["--series", "6", "--m", "1", "--branch", "+"],
        ["--series", "5", "--m", "1", "--branch", "-"],
        ["--series", "4", "--abc", "1,-2,3"],
        ["--series", "4", "--word", "tail=const:0", "--abc", "1,-2,2", "--level", "4"],
    ],
)
def test_eigenfunction_export_and_check(capsys, tmp_path, argv):
    path = tmp_path / "ef.json"
    code, _, err = run(capsys, "eigenfunction", *argv, "--out", str(path))
    assert code == 0 and "residual 0" in err
    code, out, _ = run(capsys, "eigenfunction", "--check", str(path))
    assert code == 0 and "residual 0" in out


def test_eigenfunction_check_rejects_tampered(capsys, tmp_path):
    path = tmp_path / "ef.json"
    run(capsys, "eigenfunction", "--series", "6", "--out", str(path))
    d = json.loads(path.read_text())
    d["eigenvalue"] = "5"
    path.write_text(json.dumps(d))
    assert run(capsys, "eigenfunction", "--check", str(path))[0] == 1


def test_dimension_error_is_usage(capsys):
    code, _, err = run(capsys, "eigenfunction", "--series", "4", "--word", "tail=const:0", "--abc", "1,2,3")
    assert code == 2 and "two dimensional" in err


def test_verify_all(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify-all", "--out", str(path))
    assert code == 0 and "12/12 criteria passed" in out
    assert len(json.loads(path.read_text())) == 12


def test_verify_all_negative_control(capsys):
    code, out, _ = run(capsys, "verify-all", "--inject", "a2-sign")
    assert code == 1
    lines = [ln for ln in out.splitlines() if ln.startswith("[")]
    assert [ln.split()[2] for ln in lines if ln.startswith("[FAIL]")] == ["5"]


def test_verify_all_float_backend(capsys):
    code, out, _ = run(capsys, "verify-all", "--backend", "float")
    assert code == 0 and "downgraded" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "sglattice", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "verify-all" in res.stdout
