import json
import subprocess
import sys

import numpy as np
import pytest

from trotterkit.cli import InputError, main, parse_step_range, read_csv_table
from trotterkit.hamiltonians import build_random_hermitian
from trotterkit.matrix_io import load_matrix, matrix_from_json, save_matrix, vector_from_json
from trotterkit.trotter import ConvergenceReport, read_convergence_csv


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


@pytest.mark.parametrize(
    "text, expected",
    [
        ("4:512:x2", [4, 8, 16, 32, 64, 128, 256, 512]),
        ("1:100:x10", [1, 10, 100]),
        ("2:10:+4", [2, 6, 10]),
        ("4:16", [4, 8, 16]),
        ("3,5,9", [3, 5, 9]),
        ("7", [7]),
    ],
)
def test_step_range(text, expected):
    assert parse_step_range(text) == expected


@pytest.mark.parametrize("text", ["", "4:2", "0:8", "4:64:y2", "4:64:x1", "8,4", "a:b"])
def test_step_range_rejects(text):
    with pytest.raises(InputError):
        parse_step_range(text)


def test_trotter_sweep_example(tmp_path):
    code, out = run(tmp_path, "trotter-sweep", "--pauli", "S=1*X", "--pauli", "T=1*Z", "--t", "1", "--n", "4:512:x2")
    assert code == 0
    rows = read_convergence_csv(out.read_text())
    assert [n for n, _ in rows] == [4, 8, 16, 32, 64, 128, 256, 512]
    errs = dict(rows)
    for n in (64, 128, 256):
        assert errs[n] / errs[2 * n] == pytest.approx(2.0, rel=0.1)


def test_trotter_sweep_json(tmp_path):
    code, out = run(
        tmp_path, "trotter-sweep", "--random", "4", "--seed", "3", "--metric", "state",
        "--xi", "1,1j,0,0", "--n", "8:64", "--format", "json", name="r.json",
    )
    assert code == 0
    report = ConvergenceReport.from_json(out.read_text())
    assert report.step_counts == (8, 16, 32, 64)
    assert report.fitted_order == pytest.approx(1.0, abs=0.15)
    np.testing.assert_allclose(report.xi, np.array([1, 1j, 0, 0]) / np.sqrt(2))


def test_trotter_sweep_sources_agree(tmp_path):
    s, t = build_random_hermitian(3, 1), build_random_hermitian(3, 2)
    save_matrix(tmp_path / "s.json", s)
    save_matrix(tmp_path / "t.json", t)
    code, out = run(tmp_path, "trotter-sweep", "--matrix", f"S={tmp_path / 's.json'}",
                    "--matrix", f"T={tmp_path / 't.json'}", "--n", "2,4", name="a.csv")
    assert code == 0
    code, out2 = run(tmp_path, "trotter-sweep", "--random", "3", "--seed", "1", "--n", "2,4", name="b.csv")
    assert code == 0
    assert out.read_bytes() == out2.read_bytes()


def test_tight_binding_sweep(tmp_path):
    code, out = run(tmp_path, "trotter-sweep", "--tight-binding", "3", "--onsite", "1,2,3", "--n", "4,8")
    assert code == 0
    code, _ = run(tmp_path, "trotter-sweep", "--tight-binding", "3", "--onsite", "1,2", "--n", "4,8")
    assert code == 2


def test_expm_identity(tmp_path):
    code, out = run(tmp_path, "expm", "--diag", "1,2,3", "--t", "0", "--format", "json", name="u.json")
    assert code == 0
    np.testing.assert_array_equal(load_matrix(out), np.eye(3))


def test_expm_with_taylor(tmp_path):
    code, out = run(tmp_path, "expm", "--pauli", "0.5*XZ", "--pauli", "0.3*ZZ", "--t", "2", "--taylor", "20",
                    "--format", "json", name="u.json")
    assert code == 0
    obj = json.loads(out.read_text())
    assert obj["frobenius_difference"] < 1e-12
    np.testing.assert_allclose(matrix_from_json(obj["taylor"]), matrix_from_json(obj), atol=1e-12)

    code, out = run(tmp_path, "expm", "--diag", "1,-1", "--t", "0.5", "--taylor", "20")
    header, rows = read_csv_table(out.read_text())
    assert header == ["row", "col", "re", "im", "taylor_re", "taylor_im"]
    assert rows[0][2] == pytest.approx(np.cos(0.5), rel=1e-15)
    assert len(rows) == 4


def test_splitstep_example(tmp_path):
    snaps = tmp_path / "snaps.json"
    code, out = run(tmp_path, "splitstep", "--preset", "linear", "--t", "1", "--steps", "256",
                    "--stride", "64", "--snapshots", str(snaps))
    assert code == 0
    header, rows = read_csv_table(out.read_text())
    assert header == ["step", "time", "norm", "mean_x", "mean_p", "energy_kinetic"]
    assert [r[0] for r in rows] == [0, 64, 128, 192, 256]
    spacing = 40 / 1024
    assert rows[-1][3] == pytest.approx(-0.5, abs=2 * spacing)
    assert rows[-1][2] == pytest.approx(1.0, abs=1e-8)
    data = json.loads(snaps.read_text())
    assert [s["step"] for s in data["snapshots"]] == [0, 64, 128, 192, 256]
    psi = vector_from_json(data["snapshots"][-1]["psi"])
    assert np.sum(np.abs(psi) ** 2) * spacing == pytest.approx(1.0, abs=1e-8)


def test_defect_command(tmp_path):
    code, out = run(tmp_path, "defect", "--pauli", "S=X", "--pauli", "T=Z", "--steps", "1e-1,1e-2,1e-3")
    assert code == 0
    header, rows = read_csv_table(out.read_text())
    assert header == ["step", "defect", "defect_supremum"]
    sup = [r[2] for r in rows]
    assert sup[0] > sup[1] > sup[2]
    code, out = run(tmp_path, "defect", "--pauli", "S=X", "--pauli", "T=Z", "--format", "json", name="d.json")
    assert json.loads(out.read_text())["samples"] == 41


def test_exit_codes(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["expm", "--no-such-flag"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["splitstep", "--steps", "0"])
    assert info.value.code == 1

    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "re": [[1, 0]], "im": [[0, 0]]}')
    assert main(["expm", "--matrix", str(bad)]) == 2
    assert main(["trotter-sweep", "--pauli", "S=1*Q"]) == 2
    assert main(["trotter-sweep", "--pauli", "X"]) == 2
    assert main(["trotter-sweep", "--pauli", "S=X", "--n", "8:4"]) == 2

    nonherm = tmp_path / "nh.json"
    nonherm.write_text('{"dim": 2, "re": [[0, 1], [0, 0]], "im": [[0, 0], [0, 0]]}')
    assert main(["expm", "--matrix", str(nonherm)]) == 3
    assert "numerical error" in capsys.readouterr().err


def test_seed_env_override(tmp_path, monkeypatch):
    _, a = run(tmp_path, "trotter-sweep", "--random", "3", "--seed", "5", "--n", "4,8", name="a.csv")
    monkeypatch.setenv("TROTTERKIT_SEED", "5")
    _, b = run(tmp_path, "trotter-sweep", "--random", "3", "--seed", "99", "--n", "4,8", name="b.csv")
    assert a.read_bytes() == b.read_bytes()
    monkeypatch.setenv("TROTTERKIT_SEED", "nope")
    code, _ = run(tmp_path, "trotter-sweep", "--random", "3", "--n", "4,8", name="c.csv")
    assert code == 2


def test_csv_format_details(tmp_path):
    _, out = run(tmp_path, "trotter-sweep", "--pauli", "S=X", "--pauli", "T=Z", "--n", "4,8")
    raw = out.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    value = raw.decode().splitlines()[1].split(",")[1]
    assert len(value.replace(".", "").lstrip("0")) == 17


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "trotterkit", "expm", "--diag", "1,2", "--t", "0", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith("row,col,re,im\n")
