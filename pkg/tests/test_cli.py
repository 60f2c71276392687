import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from qdedekind.cli import main, sweep_points
from qdedekind.periodic import PeriodicMap


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sigma2_methods(capsys):
    assert run(capsys, "sigma2", "--r", "1", "--p", "3", "--method", "exact")[:2] == (0, "4\n")
    code, out, _ = run(capsys, "sigma2", "--r", "1", "--p", "5", "--method", "radial")
    assert code == 0 and abs(float(out) - 20) < 1e-3
    code, out, _ = run(capsys, "sigma2", "--r", "3", "--p", "5", "--method", "cot3", "--precision", "extended")
    assert code == 0 and abs(float(out) - 12) < 1e-9


def test_sigma2_domain_error(capsys):
    code, _, err = run(capsys, "sigma2", "--r", "2", "--p", "4")
    assert code == 2 and "coprime" in err


def test_sigma2_verbose_json(capsys):
    code, out, _ = run(capsys, "--json", "sigma2", "--r", "1", "--p", "3", "--verbose")
    data = json.loads(out)
    assert code == 0 and data["value"] == 4 and data["S2"] == "16/27"


def test_dedekind(capsys):
    assert run(capsys, "dedekind", "--g", "0", "--r", "1", "--p", "3", "--exact")[1] == "2/3\n"
    assert run(capsys, "dedekind", "--g", "2", "--r", "1", "--p", "3")[1] == "16/27\n"
    assert run(capsys, "dedekind", "--g", "0", "--r", "1", "--p", "1")[1] == "0\n"
    code, out, _ = run(capsys, "dedekind", "--g", "0", "--r", "1", "--p", "3", "--float")
    assert float(out) == pytest.approx(2 / 3)
    assert run(capsys, "dedekind", "--g", "1", "--r", "1", "--p", "3")[0] == 2


def test_bad_arguments(capsys):
    assert main(["sigma2", "--r", "x", "--p", "3"]) == 2
    assert main(["verify", "no-such-suite"]) == 2
    capsys.readouterr()


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "main-theorem", "--pmax", "49"],
        ["verify", "reciprocity", "--g", "0", "--gamma", "1,0,2,1", "--pmax", "49"],
        ["verify", "reciprocity", "--g", "2", "--radius", "1", "--pmax", "9"],
        ["verify", "reciprocity", "--k", "4", "--N", "3", "--radius", "1", "--pmax", "6"],
        ["verify", "theta"],
        ["verify", "asymptotic", "--g", "2"],
        ["verify", "trig-identities", "--pmax", "51"],
        ["verify", "lfunc", "--k", "4", "--N", "4", "--seed", "2"],
    ],
)
def test_verify_suites_pass(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0, out


def test_verify_json_report(capsys):
    code, out, _ = run(capsys, "--json", "verify", "main-theorem", "--pmax", "9")
    data = json.loads(out)
    assert code == 0 and data["ok"] and data["failed"] == 0 and data["passed"] == 9


def test_verify_failure_exit_code(capsys):
    # an absurd tolerance on a float suite must fail
    code, _, _ = run(capsys, "--tolerance", "1e-30", "verify", "theta")
    assert code == 1


def test_reciprocity_rejects_foreign_matrix(capsys):
    code, _, err = run(capsys, "verify", "reciprocity", "--g", "0", "--gamma", "1,0,3,1")
    assert code == 2


def test_lfunc_from_files(tmp_path, capsys):
    chi = PeriodicMap(4, (0, 1, 0.5j, -1))
    psi = PeriodicMap(4, (0, 2, 1, 2))
    (tmp_path / "chi.json").write_text(chi.to_json())
    (tmp_path / "psi.json").write_text(psi.to_json())
    code, out, _ = run(capsys, "verify", "lfunc", "--k", "3", "--chi", str(tmp_path / "chi.json"), "--psi", str(tmp_path / "psi.json"))
    assert code == 0, out
    (tmp_path / "bad.json").write_text("{}")
    code, _, _ = run(capsys, "verify", "lfunc", "--chi", str(tmp_path / "bad.json"), "--psi", str(tmp_path / "psi.json"))
    assert code == 2
    code, _, _ = run(capsys, "verify", "lfunc", "--chi", str(tmp_path / "missing.json"), "--psi", str(tmp_path / "psi.json"))
    assert code == 3


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_values(capsys):
    code, out, _ = run(capsys, "sweep", "--g", "0", "--pmax", "5")
    rows = _rows(out)
    assert code == 0
    assert out.splitlines()[0] == "r,p,x,value,exact"
    row = next(r for r in rows if (r["r"], r["p"]) == ("1", "3"))
    assert row["value"] == "0.666666666667" and row["exact"] == "2/3"
    keys = [(int(r["p"]), int(r["r"])) for r in rows]
    assert keys == sorted(keys)
    assert all(-2 < Fraction(int(r["r"]), int(r["p"])) < 2 for r in rows)


@pytest.mark.parametrize("g", [0, 2])
def test_sweep_corrected_is_smooth(capsys, g):
    code, out, _ = run(capsys, "sweep", "--g", str(g), "--pmax", "15", "--transform", "qm-defect-corrected")
    assert code == 0
    for row in _rows(out):
        x = Fraction(int(row["r"]), int(row["p"]))
        expected = Fraction(1, 2) if g == 0 else 2 * x * x + 2 * x + 1
        assert Fraction(row["exact"]) == expected
    if g == 2:
        row = next(r for r in _rows(out) if (r["r"], r["p"]) == ("1", "3"))
        assert Fraction(row["exact"]) == Fraction(17, 9)


def test_sweep_defect_term(capsys):
    _, out, _ = run(capsys, "sweep", "--g", "0", "--pmax", "7", "--transform", "qm-defect")
    for row in _rows(out):
        r, p = int(row["r"]), int(row["p"])
        assert Fraction(row["exact"]) == Fraction(1, 2) + Fraction(1, 2 * p * (2 * r + p))


def test_sweep_is_deterministic_and_threaded(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--g", "2", "--pmax", "11", "--out", str(a)]) == 0
    assert main(["--threads", "2", "sweep", "--g", "2", "--pmax", "11", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    capsys.readouterr()


def test_sweep_io_error(capsys):
    code, _, err = run(capsys, "sweep", "--g", "0", "--pmax", "5", "--out", "/nonexistent-dir/x.csv")
    assert code == 3


def test_sweep_points_include_p_one():
    pts = list(sweep_points(3))
    assert pts[:2] == [(-1, 1), (1, 1)]


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("QDEDEKIND_THREADS", "2")
    assert run(capsys, "verify", "main-theorem", "--pmax", "15")[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qdedekind", "dedekind", "--g", "0", "--r", "1", "--p", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "2/3"
