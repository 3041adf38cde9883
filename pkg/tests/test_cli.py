"""End-to-end tests of the command-line interface."""

import json
import os

import numpy as np
import pytest

from sscsim.cli import main
from sscsim.montecarlo import ResultPoint, write_results_csv


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_code_json(capsys):
    code, out, _ = run_cli(capsys, "build-code", "--L", "3", "--geometry", "toric",
                           "--dump", "json")
    assert code == 0
    data = json.loads(out)
    assert data["n_qubits"] == 27
    assert data["counts"]["k"] == 2
    assert data["validation"]["passed"]
    assert len(data["operators"]["stabilizers_x"]) == 9


def test_build_code_distance(capsys):
    code, out, _ = run_cli(capsys, "build-code", "--L", "2", "--geometry", "toric",
                           "--distance")
    assert code == 0
    assert json.loads(out)["distance"] == {"X": 2, "Z": 2}


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["build-code", "--L", "3", "--frobnicate"])
    assert exc.value.code == 2


def test_empty_rate_list_is_config_error(capsys):
    code, _, err = run_cli(
        capsys, "threshold-scan", "--L", "3", "--p", "", "--out", "/tmp/x.csv",
        "--noise", "code-capacity", "--quiet",
    )
    assert code == 3
    assert "error" in json.loads(err)


def test_find_schedule(capsys):
    code, out, _ = run_cli(capsys, "find-schedule", "--dump")
    assert code == 0
    assert "round table" in out
    data = json.loads(out[out.index("{"):])
    assert data["exchange_symmetric"] is True


def test_enumerate_faults_csv(capsys):
    import csv as csvmod
    import io

    code, out, _ = run_cli(capsys, "enumerate-faults", "--L", "2", "--T", "1")
    assert code == 0
    rows = list(csvmod.reader(io.StringIO(out)))
    assert rows[0][:3] == ["fault_id", "kind", "round"]
    # every fault row lists zero or two defects
    for row in rows[1:]:
        assert row[6].count("(") in (0, 2)


def test_dump_lattice_and_decode_roundtrip(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "dump-lattice", "--L", "3", "--mode", "2d",
                           "--geometry", "toric", "--p", "0.05")
    assert code == 0
    lattice_file = tmp_path / "lat.csv"
    lattice_file.write_text(out)
    defects_file = tmp_path / "defects.txt"
    defects_file.write_text("0 4\n")
    code, out, _ = run_cli(capsys, "decode", "--lattice", str(lattice_file),
                           "--defects", str(defects_file))
    assert code == 0
    assert "0" in out and "4" in out


def test_threshold_scan_manifest_reproduction(capsys, tmp_path):
    out_csv = str(tmp_path / "scan.csv")
    code, _, _ = run_cli(
        capsys, "threshold-scan", "--noise", "code-capacity", "--L", "3,4",
        "--p", "0.05:0.07:0.01", "--trials", "80", "--seed", "31",
        "--T", "0", "--out", out_csv, "--quiet", "--jobs", "1",
    )
    assert code == 0
    assert os.path.exists(out_csv + ".manifest.json")
    out2 = str(tmp_path / "scan2.csv")
    code, out, _ = run_cli(
        capsys, "threshold-scan", "--from-manifest", out_csv + ".manifest.json",
        "--out", out2, "--check", "--quiet", "--jobs", "1",
    )
    assert code == 0
    assert json.loads(out[out.index("{"):])["reproduced"] is True


def test_fit_threshold_on_synthetic_csv(capsys, tmp_path):
    pth, nu = 0.0065, 1.25
    pts = []
    for L in (8, 12, 16):
        for p in np.linspace(0.005, 0.008, 7):
            u = (p - pth) * L ** (1 / nu)
            y = 0.1 + 5 * u + 30 * u * u
            pts.append(ResultPoint("toric", "circuit", L, L, float(p), 10**9,
                                   int(y * 1e9), y, y, y))
    path = tmp_path / "synth.csv"
    write_results_csv(str(path), pts)
    code, out, _ = run_cli(capsys, "fit-threshold", str(path))
    assert code == 0
    fit = json.loads(out)
    assert abs(fit["p_th"] - pth) < 1e-6
    assert abs(fit["nu"] - nu) < 1e-4


def test_hamiltonian_spectrum_cli(capsys):
    code, out, _ = run_cli(capsys, "hamiltonian-spectrum", "--L", "2", "--numeric")
    assert code == 0
    data = json.loads(out)
    assert data["ground_degeneracy"] == 4
    assert abs(data["numeric_ground_energy"] - data["ground_energy"]) < 1e-6


def test_decouple_search_cli(capsys):
    code, out, _ = run_cli(capsys, "decouple-search", "--L", "4", "--dump")
    assert code == 0
    data = json.loads(out)
    assert data["verification"]["passed"] is True
    assert len(data["rounds"]) == 4
    assert "gauge_x(0,0)" in data["conjugated_operators"]


def test_ssc_seed_env_override(capsys, tmp_path, monkeypatch):
    args = ["run-trials", "--noise", "code-capacity", "--L", "4", "--p", "0.06",
            "--trials", "60", "--T", "0", "--quiet", "--jobs", "1"]
    code, out_a, _ = run_cli(capsys, *args, "--seed", "77")
    monkeypatch.setenv("SSC_SEED", "77")
    code, out_b, _ = run_cli(capsys, *args, "--seed", "123")
    assert json.loads(out_a) == json.loads(out_b)
