import hashlib
import random
import shutil
import subprocess

import gmpy2
import pytest

from bigcatalan.errors import VerificationError
from bigcatalan.factorization import factorize
from bigcatalan.reconstruct import reconstruct
from bigcatalan.verify import (
    DEFAULT_MODULI,
    ExpectedClaims,
    audit_factorization,
    modular_value,
    sha256_of_file,
    verify_result,
)

EMPTY_SHA256 = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


def test_default_moduli_are_distinct_large_primes():
    assert len(set(DEFAULT_MODULI)) == 5
    for m in DEFAULT_MODULI:
        assert m.bit_length() >= 60
        assert gmpy2.is_prime(m)


def test_modular_value_examples():
    assert modular_value(factorize(5), 100) == 42
    assert modular_value(factorize(10), 7) == 16796 % 7 == 3
    for m in (2, 97, 10**9 + 7):
        assert modular_value(factorize(1), m) == 1 % m
    with pytest.raises(ValueError):
        modular_value(factorize(5), 1)


def test_modular_value_agrees_with_oracle(catalan_table):
    rng = random.Random(63)
    moduli = [int(gmpy2.next_prime(rng.getrandbits(63) | (1 << 62))) for _ in range(20)]
    for n in (0, 1, 2, 17, 100, 500, 2000):
        f = factorize(n)
        for m in moduli:
            assert modular_value(f, m) == catalan_table[n] % m


def test_sha256_of_file(tmp_path):
    empty = tmp_path / "empty.bin"
    empty.write_bytes(b"")
    assert sha256_of_file(empty) == EMPTY_SHA256
    one = tmp_path / "one.bin"
    one.write_bytes(b"\x2a")
    assert sha256_of_file(one) == hashlib.sha256(b"\x2a").hexdigest()
    tool = shutil.which("sha256sum")
    if tool:
        out = subprocess.run([tool, str(one)], capture_output=True, text=True, check=True)
        assert sha256_of_file(one) == out.stdout.split()[0]


def test_verify_result_self_consistency(tmp_path):
    f = factorize(100)
    result, value = reconstruct(f, output_path=tmp_path / "c100.bin")
    report = verify_result(
        f,
        result.output_path,
        moduli=(2**61 - 1, 10**9 + 7),
    )
    assert report.all_pass
    assert report.digits_measured == 57
    assert report.bitlen_measured == int(value).bit_length()
    assert report.file_size == (report.bitlen_measured + 7) // 8
    assert all(c.match for c in report.modulus_checks)
    assert report.sha256_hex == result.sha256_hex


def test_verify_result_detects_tampering(tmp_path):
    f = factorize(100)
    result, _ = reconstruct(f, output_path=tmp_path / "c100.bin")
    data = bytearray(result.output_path.read_bytes())
    data[3] ^= 0x40
    tampered = tmp_path / "tampered.bin"
    tampered.write_bytes(bytes(data))
    report = verify_result(
        f, tampered, claims=ExpectedClaims(sha256=result.sha256_hex)
    )
    assert not report.all_pass
    sha_checks = [c for c in report.checks if c.name == "sha256"]
    assert sha_checks and not sha_checks[0].passed
    assert any(c.match is False for c in report.modulus_checks)


def test_verify_result_wrong_digit_claim_fails_only_digits(tmp_path):
    f = factorize(100)
    result, _ = reconstruct(f, output_path=tmp_path / "c100.bin")
    report = verify_result(f, result.output_path, claims=ExpectedClaims(digits=58))
    assert not report.all_pass
    for check in report.checks:
        assert check.passed == (check.name != "digits")


def test_verify_result_bitlen_claim(tmp_path):
    f = factorize(60)
    result, _ = reconstruct(f, output_path=tmp_path / "c60.bin")
    good = verify_result(f, result.output_path, claims=ExpectedClaims(bit_length=result.value_bit_length))
    assert good.all_pass
    bad = verify_result(f, result.output_path, claims=ExpectedClaims(bit_length=7))
    assert not bad.all_pass


def test_verify_result_empty_or_missing_binary(tmp_path):
    f = factorize(5)
    empty = tmp_path / "empty.bin"
    empty.write_bytes(b"")
    with pytest.raises(VerificationError):
        verify_result(f, empty)
    with pytest.raises(VerificationError):
        verify_result(f, tmp_path / "nope.bin")


def test_verify_result_notes_byte_order_mismatch(tmp_path):
    f = factorize(100)
    little, _ = reconstruct(f, output_path=tmp_path / "little.bin", byte_order="little")
    big, _ = reconstruct(f, output_path=tmp_path / "big.bin", byte_order="big")
    assert little.sha256_hex != big.sha256_hex
    report = verify_result(
        f,
        little.output_path,
        claims=ExpectedClaims(sha256=big.sha256_hex, bit_length=little.value_bit_length),
    )
    assert not report.all_pass
    assert all(c.match for c in report.modulus_checks)
    assert any("byte order" in note for note in report.notes)


def test_verify_result_reads_big_endian_files(tmp_path):
    f = factorize(100)
    big, _ = reconstruct(f, output_path=tmp_path / "big.bin", byte_order="big")
    report = verify_result(f, big.output_path, byte_order="big")
    assert report.all_pass


def test_audit_factorization_without_binary():
    f = factorize(100)
    report = audit_factorization(f, claims=ExpectedClaims(digits=57))
    assert report.all_pass
    assert report.digits_measured is None
    assert report.sha256_hex is None
    assert all(c.match is None for c in report.modulus_checks)
    assert any("hash check skipped" in note for note in report.notes)
    bad = audit_factorization(f, claims=ExpectedClaims(digits=58))
    assert not bad.all_pass


def test_report_renderings(tmp_path):
    f = factorize(10)
    result, _ = reconstruct(f, output_path=tmp_path / "c10.bin")
    report = verify_result(f, result.output_path)
    text = report.to_text()
    assert "all checks passed" in text
    kv = report.kv_lines()
    assert all(" expected=" in line and " actual=" in line and " pass=" in line for line in kv)
    assert kv[-1].startswith("check=all ")
