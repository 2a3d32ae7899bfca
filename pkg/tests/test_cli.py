import os
import subprocess
import sys
from pathlib import Path

import pytest

from bigcatalan.cli import (
    EXIT_NONINTEGRAL,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_RESOURCE,
    EXIT_VERIFY,
    main,
)
from bigcatalan.factorization import read_factorization_file
from bigcatalan.reconstruct import expand_factorization

SRC = str(Path(__file__).resolve().parent.parent / "src")


def run_cli(args: list[str], cwd: Path) -> int:
    old = Path.cwd()
    os.chdir(cwd)
    try:
        return main(args)
    finally:
        os.chdir(old)


def run_cli_subprocess(args: list[str], cwd: Path) -> subprocess.CompletedProcess:
    env = dict(os.environ, PYTHONPATH=SRC)
    return subprocess.run(
        [sys.executable, "-m", "bigcatalan", *args],
        cwd=cwd, env=env, capture_output=True, text=True,
    )


def test_factorize_writes_expected_file(tmp_path, capsys):
    assert run_cli(["factorize", "--n", "5", "--quiet"], tmp_path) == EXIT_OK
    out = capsys.readouterr().out
    assert "prime_count=3" in out
    assert "estimated_digits=2" in out
    text = (tmp_path / "catalan_5_factorization.txt").read_text()
    assert "# exponent=1 count=3" in text
    assert "2 3 7" in text


def test_factorize_trivial_n(tmp_path):
    assert run_cli(["factorize", "--n", "1", "--quiet"], tmp_path) == EXIT_OK
    f = read_factorization_file(tmp_path / "catalan_1_factorization.txt")
    assert f.groups == ()


def test_factorize_binomial(tmp_path):
    assert run_cli(["factorize", "--binomial", "4", "2", "--quiet"], tmp_path) == EXIT_OK
    f = read_factorization_file(tmp_path / "binomial_4_2_factorization.txt")
    assert int(expand_factorization(f)) == 6


def test_factorize_non_integral_exit_code(tmp_path, capsys):
    code = run_cli(["factorize", "--numerator", "2", "--denominator", "4", "--quiet"], tmp_path)
    assert code == EXIT_NONINTEGRAL


def test_factorize_requires_exactly_one_spec(tmp_path):
    with pytest.raises(SystemExit) as err:
        run_cli(["factorize", "--quiet"], tmp_path)
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        run_cli(["factorize", "--n", "5", "--binomial", "4", "2"], tmp_path)
    assert err.value.code == 2


def test_reconstruct_roundtrip(tmp_path, capsys):
    run_cli(["factorize", "--n", "5", "--quiet"], tmp_path)
    code = run_cli(["reconstruct", "catalan_5_factorization.txt", "--quiet"], tmp_path)
    assert code == EXIT_OK
    assert (tmp_path / "catalan_5_reconstructed.bin").read_bytes() == b"\x2a"


def test_reconstruct_emit_decimal(tmp_path):
    run_cli(["factorize", "--n", "10", "--quiet"], tmp_path)
    code = run_cli(
        ["reconstruct", "catalan_10_factorization.txt", "--emit-decimal", "--quiet"],
        tmp_path,
    )
    assert code == EXIT_OK
    assert (tmp_path / "catalan_10_reconstructed.txt").read_bytes() == b"16796\n"


def test_reconstruct_missing_input(tmp_path, capsys):
    code = run_cli(["reconstruct", "no_such_file.txt", "--quiet"], tmp_path)
    assert code == EXIT_PARSE
    assert "no_such_file.txt" in capsys.readouterr().err


def test_reconstruct_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("# n=5\n# exponent=1 count=3\n2 3\n")
    assert run_cli(["reconstruct", "bad.txt", "--quiet"], tmp_path) == EXIT_PARSE


def test_reconstruct_budget_exhaustion(tmp_path):
    run_cli(["factorize", "--n", "500", "--quiet"], tmp_path)
    code = run_cli(
        ["reconstruct", "catalan_500_factorization.txt", "--memory-budget", "4", "--quiet"],
        tmp_path,
    )
    assert code == EXIT_RESOURCE


def test_solve_confirmed(tmp_path, capsys):
    assert run_cli(["solve", "--digits", "10", "--quiet"], tmp_path) == EXIT_OK
    out = capsys.readouterr().out
    assert "n=19" in out
    assert "confirmed=true" in out


def test_solve_reference_digits(tmp_path, capsys):
    assert run_cli(["solve", "--digits", "1234567890", "--quiet"], tmp_path) == EXIT_OK
    out = capsys.readouterr().out
    assert "n=2050572903" in out
    assert "confirmed=false" in out


def test_solve_one_digit(tmp_path, capsys):
    assert run_cli(["solve", "--digits", "1", "--quiet"], tmp_path) == EXIT_OK
    assert "n=0" in capsys.readouterr().out


def test_verify_self_produced(tmp_path, capsys):
    run_cli(["run", "--n", "100", "--quiet"], tmp_path)
    code = run_cli(
        [
            "verify",
            "--factorization", "catalan_100_factorization.txt",
            "--binary", "catalan_100_reconstructed.bin",
            "--quiet",
        ],
        tmp_path,
    )
    assert code == EXIT_OK


def test_verify_flipped_byte(tmp_path):
    run_cli(["run", "--n", "100", "--quiet"], tmp_path)
    binary = tmp_path / "catalan_100_reconstructed.bin"
    data = bytearray(binary.read_bytes())
    data[0] ^= 1
    binary.write_bytes(bytes(data))
    code = run_cli(
        [
            "verify",
            "--factorization", "catalan_100_factorization.txt",
            "--binary", "catalan_100_reconstructed.bin",
            "--quiet",
        ],
        tmp_path,
    )
    assert code == EXIT_VERIFY


def test_verify_factorization_only(tmp_path, capsys):
    run_cli(["factorize", "--n", "100", "--quiet"], tmp_path)
    code = run_cli(
        ["verify", "--factorization", "catalan_100_factorization.txt", "--expect-digits", "57"],
        tmp_path,
    )
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "hash check skipped" in out
    assert "residue mod" in out


def test_verify_random_moduli(tmp_path):
    run_cli(["run", "--n", "50", "--quiet"], tmp_path)
    code = run_cli(
        [
            "verify",
            "--factorization", "catalan_50_factorization.txt",
            "--binary", "catalan_50_reconstructed.bin",
            "--random-moduli", "3",
            "--quiet",
        ],
        tmp_path,
    )
    assert code == EXIT_OK


def test_run_end_to_end(tmp_path, capsys):
    assert run_cli(["run", "--n", "1000", "--quiet"], tmp_path) == EXIT_OK
    out = capsys.readouterr().out
    assert "verification=pass" in out
    assert (tmp_path / "catalan_1000_factorization.txt").exists()
    assert (tmp_path / "catalan_1000_reconstructed.bin").exists()


def test_run_chunk_invariance(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir(), b.mkdir()
    assert run_cli(["run", "--n", "5", "--quiet"], a) == EXIT_OK
    assert run_cli(["run", "--n", "5", "--chunk-size", "1", "--quiet"], b) == EXIT_OK
    for name in ("catalan_5_factorization.txt", "catalan_5_reconstructed.bin"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_run_solves_digit_target_first(tmp_path):
    assert run_cli(["run", "--digits", "10", "--quiet"], tmp_path) == EXIT_OK
    assert (tmp_path / "catalan_19_reconstructed.bin").exists()


def test_run_big_endian(tmp_path):
    assert run_cli(["run", "--n", "10", "--byte-order", "big", "--quiet"], tmp_path) == EXIT_OK
    assert (tmp_path / "catalan_10_reconstructed.bin").read_bytes() == (16796).to_bytes(2, "big")


def test_console_entry_point_subprocess(tmp_path):
    proc = run_cli_subprocess(["run", "--n", "20", "--emit-decimal"], tmp_path)
    assert proc.returncode == 0, proc.stderr
    assert "decimal digits" in proc.stdout
    assert (tmp_path / "catalan_20_reconstructed.txt").read_text() == "6564120420\n"
    proc = run_cli_subprocess(["solve", "--digits", "9"], tmp_path)
    assert proc.returncode == 0
    assert "n = 17" in proc.stdout
    proc = run_cli_subprocess([], tmp_path)
    assert proc.returncode == 2
