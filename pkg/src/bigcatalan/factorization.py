"""Phase 1 driver: prime exponents, grouping, digit estimate, text format.

factorize() streams sieve segments (optionally through a worker pool),
computes the net exponent of every prime in the target ratio, and collects
primes into groups keyed by exponent. The groups, together with the ratio
definition, are the complete description of the target integer; they can
be serialized to a line-oriented text format and parsed back losslessly.

The decimal digit count is estimated from sum(e_p * log10 p) accumulated
in exact fixed point with a tracked error bound, so the reported count is
provably exact whenever the boundary flag is clear.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from functools import cached_property
from multiprocessing import Pool
from typing import BinaryIO, Callable, Iterable, Sequence

import numpy as np

from .errors import FactorizationParseError, NonIntegralRatioError
from .fixedlog import FRAC_BITS, error_to_fixed, fixed_floor, fixed_fraction, fixed_point_log10
from .reconstruct import balanced_product
from .sieve import DEFAULT_SEGMENT_SIZE, SieveLimit, _seed_array, _segment_prime_array, segment_bounds
from .valuation import RatioSpec

LINE_WIDTH = 4096
_ESTIMATE_CHUNK = 65536


@dataclass(frozen=True)
class ExponentGroup:
    """All primes whose exponent in the target integer is exactly `exponent`."""

    exponent: int
    primes: list[int]

    def __post_init__(self) -> None:
        if self.exponent < 1:
            raise ValueError(f"group exponent must be >= 1, got {self.exponent}")
        if not self.primes:
            raise ValueError("group prime list must not be empty")
        if not _strictly_ascending(self.primes):
            raise ValueError(f"group exponent={self.exponent} primes are not strictly ascending")


@dataclass(frozen=True)
class DigitEstimate:
    """Digit count derived from a fixed-point sum of e_p * log10(p).

    log10_fixed is the sum scaled by 2**FRAC_BITS; error_bound is an
    absolute bound on the accumulated error. When boundary_flag is False
    the fractional part is provably away from an integer crossing and
    `digits` is exact.
    """

    log10_fixed: int
    error_bound: float
    digits: int
    boundary_flag: bool

    @property
    def log10_sum(self) -> float:
        return self.log10_fixed / float(1 << FRAC_BITS)


@dataclass(frozen=True)
class Factorization:
    """Complete prime-power decomposition of a factorial ratio.

    Groups are kept in descending exponent order and cover exactly the
    primes with positive net exponent; expanding prod(p**e) over all
    groups reproduces the target integer.
    """

    spec: RatioSpec
    groups: tuple[ExponentGroup, ...]

    def __post_init__(self) -> None:
        exps = [g.exponent for g in self.groups]
        if any(a <= b for a, b in zip(exps, exps[1:])):
            raise ValueError("groups must be in strictly descending exponent order")
        _check_disjoint(self.groups)

    @property
    def prime_count(self) -> int:
        return sum(len(g.primes) for g in self.groups)

    @cached_property
    def digit_estimate(self) -> DigitEstimate:
        return estimate_digits(self)


def _strictly_ascending(xs: Sequence[int]) -> bool:
    if len(xs) > 100_000:
        arr = np.asarray(xs, dtype=np.int64)
        return bool(np.all(arr[1:] > arr[:-1]))
    return all(a < b for a, b in zip(xs, xs[1:]))


def _check_disjoint(groups: Sequence[ExponentGroup]) -> None:
    total = sum(len(g.primes) for g in groups)
    if total <= 2_000_000:
        seen: set[int] = set()
        for g in groups:
            seen.update(g.primes)
        if len(seen) != total:
            raise ValueError("a prime appears in more than one exponent group")
    else:
        arr = np.concatenate([np.asarray(g.primes, dtype=np.int64) for g in groups])
        if np.unique(arr).size != total:
            raise ValueError("a prime appears in more than one exponent group")


def _exponents_for_primes(parr: np.ndarray, num: tuple[int, ...], den: tuple[int, ...]) -> np.ndarray:
    """Net exponent of every prime in parr (ascending int64 array)."""
    e = np.zeros(parr.size, dtype=np.int64)
    for a in num:
        e += a // parr
    for b in den:
        e -= b // parr
    # powers p^k with k >= 2 only matter while p*p <= the largest argument
    max_arg = max(num + den)
    cut = int(np.searchsorted(parr, math.isqrt(max_arg), side="right"))
    for i in range(cut):
        p = int(parr[i])
        q = p * p
        extra = 0
        while q <= max_arg:
            for a in num:
                extra += a // q
            for b in den:
                extra -= b // q
            q *= p
        e[i] += extra
    return e


def _segment_groups(
    parr: np.ndarray, num: tuple[int, ...], den: tuple[int, ...]
) -> list[tuple[int, np.ndarray]]:
    if parr.size == 0:
        return []
    e = _exponents_for_primes(parr, num, den)
    negative = e < 0
    if negative.any():
        i = int(np.argmax(negative))
        raise NonIntegralRatioError(int(parr[i]), int(e[i]))
    positive = e > 0
    ep = e[positive]
    pp = parr[positive]
    return [(int(val), pp[ep == val]) for val in np.unique(ep)]


_WORKER_STATE: tuple | None = None


def _init_factorize_worker(num, den, seeds) -> None:
    global _WORKER_STATE
    _WORKER_STATE = (num, den, seeds)


def _factorize_segment_task(bounds: tuple[int, int]) -> list[tuple[int, np.ndarray]]:
    num, den, seeds = _WORKER_STATE
    lo, hi = bounds
    return _segment_groups(_segment_prime_array(lo, hi, seeds), num, den)


def factorize(
    spec: RatioSpec | int,
    *,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> Factorization:
    """Compute the full factorization of a factorial ratio.

    An int argument is shorthand for the Catalan ratio of that index.
    Segments are processed independently (in a worker pool when workers
    allows) and merged in segment order, so the result is identical for
    any segment size and worker count. A negative net exponent aborts
    with NonIntegralRatioError naming the offending prime.
    """
    if isinstance(spec, int):
        spec = RatioSpec.catalan(spec)
    num, den = spec.numerator_args, spec.denominator_args
    limit = spec.max_argument
    buckets: dict[int, list[np.ndarray]] = {}

    def absorb(segment_result: list[tuple[int, np.ndarray]]) -> None:
        for exponent, arr in segment_result:
            buckets.setdefault(exponent, []).append(arr)

    if limit >= 2:
        SieveLimit(limit)
        bounds = segment_bounds(limit, segment_size)
        seeds = _seed_array(math.isqrt(limit))
        if workers in (None, 0):
            workers = os.cpu_count() or 1
        if workers <= 1 or len(bounds) <= 2:
            for i, (lo, hi) in enumerate(bounds):
                absorb(_segment_groups(_segment_prime_array(lo, hi, seeds), num, den))
                if progress is not None:
                    progress(i + 1, len(bounds))
        else:
            with Pool(
                processes=min(workers, len(bounds)),
                initializer=_init_factorize_worker,
                initargs=(num, den, seeds),
            ) as pool:
                for i, result in enumerate(pool.imap(_factorize_segment_task, bounds)):
                    absorb(result)
                    if progress is not None:
                        progress(i + 1, len(bounds))

    groups = tuple(
        ExponentGroup(exponent, np.concatenate(buckets[exponent]).tolist())
        for exponent in sorted(buckets, reverse=True)
    )
    return Factorization(spec=spec, groups=groups)


def estimate_digits(f: Factorization) -> DigitEstimate:
    """Digit count of the target integer from the factorization alone.

    Accumulates e * log10(product of a fixed-size prime chunk) in exact
    fixed point; the chunking is canonical so the result is independent
    of how the factorization was produced.
    """
    total = 0
    err = 0.0
    for g in f.groups:
        primes = g.primes
        for i in range(0, len(primes), _ESTIMATE_CHUNK):
            fixed, bound = fixed_point_log10(balanced_product(primes[i : i + _ESTIMATE_CHUNK]))
            total += g.exponent * fixed
            err += g.exponent * bound
    digits = fixed_floor(total) + 1
    eps = error_to_fixed(err)
    frac = fixed_fraction(total)
    boundary = frac < eps or (1 << FRAC_BITS) - frac < eps
    return DigitEstimate(log10_fixed=total, error_bound=err, digits=digits, boundary_flag=boundary)


def serialize(f: Factorization, sink: BinaryIO, *, line_width: int = LINE_WIDTH) -> None:
    """Write the factorization text format.

    Header comments identify the ratio and carry metadata; each group is
    one `# exponent=E count=K` line followed by its primes in ascending
    order, space separated and wrapped at line_width characters. Groups
    appear in descending exponent order and the file ends with a newline.
    """
    if line_width < 1:
        raise ValueError(f"line_width must be >= 1, got {line_width}")

    def emit(line: str) -> None:
        sink.write(line.encode("ascii"))
        sink.write(b"\n")

    emit(f"# Prime factorization of {f.spec.display_name}")
    n = f.spec.catalan_n
    if n is not None:
        emit(f"# n={n}")
    emit(f"# spec_numerator={' '.join(map(str, f.spec.numerator_args))}")
    emit(f"# spec_denominator={' '.join(map(str, f.spec.denominator_args))}")
    emit(f"# prime_count={f.prime_count}")
    emit(f"# estimated_digits={f.digit_estimate.digits}")
    for g in f.groups:
        emit(f"# exponent={g.exponent} count={len(g.primes)}")
        buf: list[str] = []
        width = 0
        for p in g.primes:
            s = str(p)
            if buf and width + 1 + len(s) > line_width:
                emit(" ".join(buf))
                buf = [s]
                width = len(s)
            else:
                buf.append(s)
                width += len(s) + (1 if len(buf) > 1 else 0)
        if buf:
            emit(" ".join(buf))


def _parse_int_list(text: str, lineno: int) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split())
    except ValueError:
        raise FactorizationParseError(f"non-numeric argument list {text!r}", lineno) from None


def parse(source: Iterable[bytes]) -> Factorization:
    """Read the factorization text format back into a Factorization.

    Accepts wrapped or single-line groups and any group order; unknown
    comment lines are ignored. Validates ascending primes within groups,
    global disjointness and declared counts, and reports the offending
    line on failure.
    """
    num_args: tuple[int, ...] | None = None
    den_args: tuple[int, ...] | None = None
    n_header: int | None = None
    name_n: int | None = None
    blocks: list[dict] = []
    current: dict | None = None
    seen: set[int] = set()
    saw_comment = False

    def close_block() -> None:
        nonlocal current
        if current is None:
            return
        if len(current["primes"]) != current["declared"]:
            raise FactorizationParseError(
                f"group exponent={current['exponent']} declares count={current['declared']}"
                f" but lists {len(current['primes'])} primes",
                current["line"],
            )
        blocks.append(current)
        current = None

    for lineno, raw in enumerate(source, start=1):
        try:
            text = raw.decode("ascii")
        except UnicodeDecodeError:
            raise FactorizationParseError("non-ASCII content", lineno) from None
        stripped = text.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            saw_comment = True
            body = stripped[1:].strip()
            if body.startswith("exponent="):
                close_block()
                m = re.fullmatch(r"exponent=(-?\d+)\s+count=(\d+)", body)
                if m is None:
                    raise FactorizationParseError(f"malformed group header {stripped!r}", lineno)
                exponent = int(m.group(1))
                if exponent < 1:
                    raise FactorizationParseError(f"group exponent must be >= 1, got {exponent}", lineno)
                current = {"exponent": exponent, "declared": int(m.group(2)), "primes": [], "line": lineno}
            elif body.startswith("spec_numerator="):
                num_args = _parse_int_list(body.partition("=")[2], lineno)
            elif body.startswith("spec_denominator="):
                den_args = _parse_int_list(body.partition("=")[2], lineno)
            elif body.startswith("n=") and body[2:].strip().isdigit():
                n_header = int(body[2:].strip())
            elif name_n is None:
                m = re.search(r"Catalan\((\d+)\)", body)
                if m is not None:
                    name_n = int(m.group(1))
        else:
            if current is None:
                raise FactorizationParseError("prime data before any exponent header", lineno)
            primes = current["primes"]
            prev = primes[-1] if primes else 1
            for tok in stripped.split():
                try:
                    p = int(tok)
                except ValueError:
                    raise FactorizationParseError(f"non-numeric token {tok!r}", lineno) from None
                if p < 2:
                    raise FactorizationParseError(f"invalid prime {p}", lineno)
                if p <= prev:
                    raise FactorizationParseError(f"primes not strictly ascending at {p}", lineno)
                if p in seen:
                    raise FactorizationParseError(f"duplicate prime {p}", lineno)
                seen.add(p)
                primes.append(p)
                prev = p
    close_block()

    if not saw_comment:
        raise FactorizationParseError("missing header (empty or headerless file)")
    if num_args is not None or den_args is not None:
        spec = RatioSpec(num_args or (), den_args or ())
    elif n_header is not None:
        spec = RatioSpec.catalan(n_header)
    elif name_n is not None:
        spec = RatioSpec.catalan(name_n)
    else:
        raise FactorizationParseError("header does not identify the ratio")

    buckets: dict[int, list[int]] = {}
    for block in blocks:
        if block["exponent"] in buckets:
            buckets[block["exponent"]] = sorted(buckets[block["exponent"]] + block["primes"])
        else:
            buckets[block["exponent"]] = block["primes"]
    groups = tuple(ExponentGroup(e, buckets[e]) for e in sorted(buckets, reverse=True))
    return Factorization(spec=spec, groups=groups)


def default_factorization_filename(spec: RatioSpec) -> str:
    return f"{spec.label}_factorization.txt"


def write_factorization_file(f: Factorization, path) -> None:
    with open(path, "wb") as sink:
        serialize(f, sink)


def read_factorization_file(path) -> Factorization:
    with open(path, "rb") as source:
        return parse(source)
