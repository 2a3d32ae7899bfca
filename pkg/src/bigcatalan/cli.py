"""Command line surface for the factorize / reconstruct / verify pipeline."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    FactorizationParseError,
    NonIntegralRatioError,
    ResourceBudgetError,
    VerificationError,
)
from .factorization import (
    default_factorization_filename,
    factorize,
    read_factorization_file,
    write_factorization_file,
)
from .reconstruct import DEFAULT_CHUNK_SIZE, ChunkPolicy, reconstruct, write_decimal
from .sieve import DEFAULT_SEGMENT_SIZE
from .target import (
    DEFAULT_ESTIMATE_LIMIT,
    DEFAULT_RECONSTRUCT_LIMIT,
    DigitTarget,
    solve_target_digits,
)
from .valuation import RatioSpec
from .verify import ExpectedClaims, audit_factorization, verify_result

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_RESOURCE = 4
EXIT_VERIFY = 5
EXIT_NONINTEGRAL = 6

_SIZE_SUFFIXES = {"k": 1 << 10, "m": 1 << 20, "g": 1 << 30, "t": 1 << 40}


@dataclass
class RunConfig:
    """Resolved settings for one pipeline invocation."""

    spec: RatioSpec
    segment_size: int = DEFAULT_SEGMENT_SIZE
    workers: int | None = None
    chunk_size: int = DEFAULT_CHUNK_SIZE
    memory_budget: int | None = None
    offload_dir: Path | None = None
    output_dir: Path = field(default_factory=lambda: Path("."))
    byte_order: str = "little"
    emit_decimal: bool = False
    quiet: bool = False

    @property
    def factorization_path(self) -> Path:
        return self.output_dir / default_factorization_filename(self.spec)

    @property
    def binary_path(self) -> Path:
        return self.output_dir / f"{self.spec.label}_reconstructed.bin"

    @property
    def decimal_path(self) -> Path:
        return self.output_dir / f"{self.spec.label}_reconstructed.txt"

    @property
    def policy(self) -> ChunkPolicy:
        return ChunkPolicy(
            chunk_size=self.chunk_size,
            memory_budget=self.memory_budget,
            offload_dir=self.offload_dir,
        )


def _parse_size(text: str) -> int:
    """Byte count with an optional K/M/G/T suffix."""
    raw = text.strip().lower()
    factor = 1
    if raw and raw[-1] in _SIZE_SUFFIXES:
        factor = _SIZE_SUFFIXES[raw[-1]]
        raw = raw[:-1]
    try:
        return int(raw) * factor
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size {text!r}") from None


def _spec_from_args(args: argparse.Namespace, parser: argparse.ArgumentParser) -> RatioSpec:
    chosen = [
        args.n is not None,
        getattr(args, "binomial", None) is not None,
        args.numerator is not None or args.denominator is not None,
    ]
    if sum(chosen) != 1:
        parser.error("give exactly one of --n, --binomial, or --numerator/--denominator")
    if args.n is not None:
        if args.n < 0:
            parser.error("--n must be >= 0")
        return RatioSpec.catalan(args.n)
    if getattr(args, "binomial", None) is not None:
        n, k = args.binomial
        if not 0 <= k <= n:
            parser.error("--binomial requires 0 <= K <= N")
        return RatioSpec.binomial(n, k)
    return RatioSpec(tuple(args.numerator or ()), tuple(args.denominator or ()))


def _config_from_args(args: argparse.Namespace, spec: RatioSpec) -> RunConfig:
    return RunConfig(
        spec=spec,
        segment_size=getattr(args, "segment_size", DEFAULT_SEGMENT_SIZE),
        workers=getattr(args, "workers", None),
        chunk_size=getattr(args, "chunk_size", DEFAULT_CHUNK_SIZE),
        memory_budget=getattr(args, "memory_budget", None),
        offload_dir=Path(args.offload_dir) if getattr(args, "offload_dir", None) else None,
        output_dir=Path(getattr(args, "output_dir", ".")),
        byte_order=getattr(args, "byte_order", "little"),
        emit_decimal=getattr(args, "emit_decimal", False),
        quiet=args.quiet,
    )


def _segment_progress(quiet: bool):
    if quiet:
        return None

    def callback(done: int, total: int) -> None:
        step = max(1, total // 10)
        if done == total or done % step == 0:
            print(f"phase 1: {done}/{total} segments", file=sys.stderr)

    return callback


def _group_progress(quiet: bool):
    if quiet:
        return None

    def callback(message: str) -> None:
        print(f"phase 2: {message}", file=sys.stderr)

    return callback


def _emit(quiet: bool, pairs: list[tuple[str, object]], human: list[str]) -> None:
    if quiet:
        for key, value in pairs:
            print(f"{key}={value}")
    else:
        for line in human:
            print(line)


def _run_phase1(config: RunConfig):
    start = time.perf_counter()
    f = factorize(
        config.spec,
        segment_size=config.segment_size,
        workers=config.workers,
        progress=_segment_progress(config.quiet),
    )
    config.output_dir.mkdir(parents=True, exist_ok=True)
    write_factorization_file(f, config.factorization_path)
    return f, time.perf_counter() - start


def cmd_factorize(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    spec = _spec_from_args(args, parser)
    config = _config_from_args(args, spec)
    f, elapsed = _run_phase1(config)
    path = config.factorization_path
    _emit(
        config.quiet,
        [
            ("factorization_path", path),
            ("prime_count", f.prime_count),
            ("estimated_digits", f.digit_estimate.digits),
            ("elapsed_s", f"{elapsed:.3f}"),
        ],
        [
            f"wrote {path}",
            f"prime count: {f.prime_count}",
            f"estimated digits: {f.digit_estimate.digits}",
            f"elapsed: {elapsed:.3f} s",
        ],
    )
    return EXIT_OK


def cmd_reconstruct(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    in_path = Path(args.factorization)
    f = read_factorization_file(in_path)
    config = _config_from_args(args, f.spec)
    out_path = Path(args.output) if args.output else config.binary_path
    out_path.parent.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    result, value = reconstruct(
        f,
        policy=config.policy,
        output_path=out_path,
        byte_order=config.byte_order,
        progress=_group_progress(config.quiet),
    )
    decimal_digits = None
    if config.emit_decimal:
        with open(config.decimal_path, "wb") as sink:
            decimal_digits = write_decimal(value, sink)
    elapsed = time.perf_counter() - start
    pairs = [
        ("binary_path", result.output_path),
        ("bit_length", result.value_bit_length),
        ("decimal_digits", result.decimal_digits),
        ("sha256", result.sha256_hex),
        ("elapsed_s", f"{elapsed:.3f}"),
    ]
    human = [
        f"wrote {result.output_path}",
        f"bit length: {result.value_bit_length}",
        f"decimal digits: {result.decimal_digits}",
        f"sha256: {result.sha256_hex}",
        f"elapsed: {elapsed:.3f} s",
    ]
    if decimal_digits is not None:
        pairs.insert(1, ("decimal_path", config.decimal_path))
        human.insert(1, f"wrote {config.decimal_path} ({decimal_digits} digits)")
    _emit(config.quiet, pairs, human)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    target = DigitTarget(args.digits)
    result = solve_target_digits(
        target,
        reconstruct_limit=args.reconstruct_limit,
        estimate_limit=args.estimate_limit,
        list_all=args.list_all,
        workers=args.workers,
    )
    solutions = result if isinstance(result, list) else ([result] if result else [])
    if not solutions:
        print(f"no index found with exactly {args.digits} digits")
        return EXIT_OK
    for sol in solutions:
        status = "confirmed" if sol.confirmed else "unconfirmed (above confirmation limits)"
        if args.quiet:
            print(
                f"n={sol.n} predicted_log10={sol.predicted_log10:.6f} "
                f"tier={sol.method} confirmed={'true' if sol.confirmed else 'false'}"
            )
        else:
            print(f"n = {sol.n}")
            print(f"predicted log10 = {sol.predicted_log10:.6f}")
            print(f"confirmation: {sol.method}, {status}")
    return EXIT_OK


def _random_prime_moduli(count: int) -> list[int]:
    import random

    import gmpy2

    rng = random.SystemRandom()
    return [int(gmpy2.next_prime(rng.getrandbits(62) | (1 << 62))) for _ in range(count)]


def cmd_verify(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    f = read_factorization_file(Path(args.factorization))
    moduli = list(args.modulus or [])
    if args.random_moduli:
        moduli.extend(_random_prime_moduli(args.random_moduli))
    claims = ExpectedClaims(
        digits=args.expect_digits,
        bit_length=args.expect_bitlen,
        sha256=args.expect_sha256,
    )
    if args.binary:
        report = verify_result(
            f,
            Path(args.binary),
            claims=claims,
            moduli=moduli or None,
            byte_order=args.byte_order,
        )
    else:
        report = audit_factorization(f, claims=claims, moduli=moduli or None)
    if args.quiet:
        for line in report.kv_lines():
            print(line)
    else:
        print(report.to_text())
        for check in report.modulus_checks:
            if check.match is None:
                print(
                    f"  residue mod {check.modulus} = "
                    f"{check.residue_from_factorization} (from factorization)"
                )
    return EXIT_OK if report.all_pass else EXIT_VERIFY


def cmd_run(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.digits is not None:
        if args.n is not None or args.binomial or args.numerator or args.denominator:
            parser.error("--digits cannot be combined with an explicit ratio")
        solution = solve_target_digits(DigitTarget(args.digits), workers=args.workers)
        if solution is None:
            print(f"no index found with exactly {args.digits} digits", file=sys.stderr)
            return EXIT_USAGE
        if not args.quiet:
            print(f"solved: n = {solution.n} ({solution.method})", file=sys.stderr)
        spec = RatioSpec.catalan(solution.n)
    else:
        spec = _spec_from_args(args, parser)
    config = _config_from_args(args, spec)

    f, phase1_s = _run_phase1(config)

    start = time.perf_counter()
    f_read = read_factorization_file(config.factorization_path)
    result, value = reconstruct(
        f_read,
        policy=config.policy,
        output_path=config.binary_path,
        byte_order=config.byte_order,
        progress=_group_progress(config.quiet),
    )
    if config.emit_decimal:
        with open(config.decimal_path, "wb") as sink:
            write_decimal(value, sink)
    phase2_s = time.perf_counter() - start

    report = verify_result(
        f_read,
        config.binary_path,
        byte_order=config.byte_order,
    )
    file_size = config.binary_path.stat().st_size
    _emit(
        config.quiet,
        [
            ("ratio", spec.display_name),
            ("decimal_digits", result.decimal_digits),
            ("bit_length", result.value_bit_length),
            ("file_size_bytes", file_size),
            ("sha256", result.sha256_hex),
            ("phase1_s", f"{phase1_s:.3f}"),
            ("phase2_s", f"{phase2_s:.3f}"),
            ("total_s", f"{phase1_s + phase2_s:.3f}"),
            ("verification", "pass" if report.all_pass else "fail"),
        ],
        [
            f"ratio:            {spec.display_name}",
            f"decimal digits:   {result.decimal_digits}",
            f"bit length:       {result.value_bit_length}",
            f"result file size: {file_size} bytes",
            f"sha256:           {result.sha256_hex}",
            f"phase 1 (wall):   {phase1_s:.3f} s",
            f"phase 2 (wall):   {phase2_s:.3f} s",
            f"total (wall):     {phase1_s + phase2_s:.3f} s",
            report.to_text(),
        ],
    )
    return EXIT_OK if report.all_pass else EXIT_VERIFY


def _add_spec_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n", type=int, default=None, help="Catalan index n")
    sub.add_argument(
        "--binomial", type=int, nargs=2, metavar=("N", "K"), default=None,
        help="binomial coefficient C(N, K)",
    )
    sub.add_argument(
        "--numerator", type=int, nargs="+", default=None, metavar="A",
        help="factorial arguments of the numerator product",
    )
    sub.add_argument(
        "--denominator", type=int, nargs="+", default=None, metavar="B",
        help="factorial arguments of the denominator product",
    )


def _add_phase1_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--segment-size", type=int, default=DEFAULT_SEGMENT_SIZE,
        help="numbers per sieve segment (default %(default)s)",
    )
    sub.add_argument(
        "--workers", type=int, default=None,
        help="sieve worker processes (default: logical cores)",
    )


def _add_phase2_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--chunk-size", type=int, default=DEFAULT_CHUNK_SIZE,
        help="operands per product-tree batch (default %(default)s)",
    )
    sub.add_argument(
        "--memory-budget", type=_parse_size, default=None,
        help="soft cap on live operand bytes, an int with optional K/M/G/T suffix",
    )
    sub.add_argument(
        "--offload-dir", default=None,
        help="directory for spilled operands; enables offloading",
    )
    sub.add_argument(
        "--byte-order", choices=("little", "big"), default="little",
        help="magnitude byte order of the binary result (default %(default)s)",
    )
    sub.add_argument(
        "--emit-decimal", action="store_true",
        help="also write the decimal digits as a text file",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bigcatalan",
        description="Exact huge Catalan numbers and factorial ratios via prime exponents",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p_fact = subparsers.add_parser("factorize", help="phase 1: write the factorization file")
    _add_spec_options(p_fact)
    _add_phase1_options(p_fact)
    p_fact.add_argument("--output-dir", default=".", help="directory for output files")
    p_fact.add_argument("--quiet", action="store_true", help="machine-readable output only")
    p_fact.set_defaults(func=cmd_factorize)

    p_rec = subparsers.add_parser("reconstruct", help="phase 2: rebuild the integer from a factorization file")
    p_rec.add_argument("factorization", help="path to the factorization text file")
    p_rec.add_argument("--output", default=None, help="binary output path")
    p_rec.add_argument("--output-dir", default=".", help="directory for default-named outputs")
    _add_phase2_options(p_rec)
    p_rec.add_argument("--quiet", action="store_true", help="machine-readable output only")
    p_rec.set_defaults(func=cmd_reconstruct)

    p_solve = subparsers.add_parser("solve", help="find n such that C(n) has a given digit count")
    p_solve.add_argument("--digits", type=int, required=True, help="target decimal digit count")
    p_solve.add_argument("--list-all", action="store_true", help="list every matching n")
    p_solve.add_argument(
        "--reconstruct-limit", type=int, default=DEFAULT_RECONSTRUCT_LIMIT,
        help="confirm by full expansion up to this n (default %(default)s)",
    )
    p_solve.add_argument(
        "--estimate-limit", type=int, default=DEFAULT_ESTIMATE_LIMIT,
        help="confirm by exact digit estimate up to this n (default %(default)s)",
    )
    p_solve.add_argument("--workers", type=int, default=None, help="workers for confirmation runs")
    p_solve.add_argument("--quiet", action="store_true", help="machine-readable output only")
    p_solve.set_defaults(func=cmd_solve)

    p_ver = subparsers.add_parser("verify", help="validate artifacts and claims")
    p_ver.add_argument("--factorization", required=True, help="factorization text file")
    p_ver.add_argument("--binary", default=None, help="reconstructed binary file")
    p_ver.add_argument("--expect-digits", type=int, default=None, help="claimed decimal digit count")
    p_ver.add_argument("--expect-bitlen", type=int, default=None, help="claimed bit length")
    p_ver.add_argument("--expect-sha256", default=None, help="claimed SHA-256 hex digest")
    p_ver.add_argument(
        "--modulus", type=int, action="append", default=None,
        help="modulus for a residue check (repeatable; default: 5 fixed primes)",
    )
    p_ver.add_argument(
        "--random-moduli", type=int, default=0,
        help="additionally check this many random 63-bit prime moduli",
    )
    p_ver.add_argument("--byte-order", choices=("little", "big"), default="little")
    p_ver.add_argument("--quiet", action="store_true", help="machine-readable output only")
    p_ver.set_defaults(func=cmd_verify)

    p_run = subparsers.add_parser("run", help="factorize, reconstruct and verify in one go")
    _add_spec_options(p_run)
    p_run.add_argument("--digits", type=int, default=None, help="solve this digit target first")
    _add_phase1_options(p_run)
    _add_phase2_options(p_run)
    p_run.add_argument("--output-dir", default=".", help="directory for output files")
    p_run.add_argument("--quiet", action="store_true", help="machine-readable output only")
    p_run.set_defaults(func=cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except NonIntegralRatioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONINTEGRAL
    except FactorizationParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceBudgetError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except VerificationError as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
