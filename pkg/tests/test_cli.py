import shutil
import subprocess
import sys

import pytest

from fraqtal.cli import main


@pytest.mark.parametrize("argv", [["--help"], ["generate", "--help"], ["analyze", "--help"],
                                  ["validate", "--help"], ["circuit", "--help"]])
def test_help_exits_zero(argv, capsys):
    assert main(argv) == 0
    assert "usage:" in capsys.readouterr().out


def test_generate_happy_path(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["generate", "--seed", "42", "--count", "8", "--size", "32x32", "--out", str(out)]) == 0
    assert len(list(out.glob("quantum_julia_*.png"))) == 8
    assert (out / "metadata.csv").read_text().count("\n") == 9
    assert "wrote 8 images" in capsys.readouterr().out


def test_circuit_ghz(capsys):
    assert main(["circuit", "--preset", "ghz", "--qubits", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1:4] == ["H q0", "CNOT q1, q0", "CNOT q2, q1"]
    probs = dict(line.split() for line in out if line[:1] in "01" and " " in line)
    assert probs["000"] == "0.500000" and probs["111"] == "0.500000"
    assert probs["010"] == "0.000000"
    assert "q0 (+0.000000, +0.000000, +0.000000)" in out


def test_circuit_random_is_repeatable(capsys):
    main(["circuit", "--seed", "9", "--qubits", "4", "--depth", "2"])
    first = capsys.readouterr().out
    main(["circuit", "--seed", "9", "--qubits", "4", "--depth", "2"])
    assert capsys.readouterr().out == first
    assert "probs_sha1 (2048 shots)" in first


def test_validate_and_analyze(small_corpus, tmp_path, capsys):
    d = tmp_path / "c"
    shutil.copytree(small_corpus.csv_path.parent, d)
    assert main(["validate", "--csv", str(d / "metadata.csv"), "--images", str(d)]) == 0
    assert main(["analyze", "--csv", str(d / "metadata.csv"), "--images", str(d), "--k", "2",
                 "--out", str(tmp_path / "rep")]) == 0
    assert (tmp_path / "rep" / "summary.json").is_file()
    (d / "quantum_julia_0002.png").unlink()
    capsys.readouterr()
    assert main(["validate", "--csv", str(d / "metadata.csv"), "--images", str(d)]) == 1
    assert "quantum_julia_0002.png" in capsys.readouterr().out
    # one of five missing exceeds the 10% budget
    assert main(["analyze", "--csv", str(d / "metadata.csv"), "--images", str(d)]) == 1
    assert "missing" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["generate", "--seed", "1", "--count", "1", "--bogus"],
                                  ["frobnicate"], [],
                                  ["generate", "--seed", "1", "--count", "1", "--size", "big"],
                                  ["circuit", "--qubits", "40"],
                                  ["generate", "--seed", "-1", "--count", "1"]])
def test_usage_errors_exit_two(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_missing_csv_is_runtime_error(tmp_path, capsys):
    assert main(["validate", "--csv", str(tmp_path / "nope.csv"), "--images", str(tmp_path)]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fraqtal", "circuit", "--preset", "qft", "--qubits", "2"],
                          capture_output=True, text=True, check=True)
    assert "probs_sha1" in proc.stdout
