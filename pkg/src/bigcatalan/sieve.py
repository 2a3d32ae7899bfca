"""Segmented Sieve of Eratosthenes producing an ordered prime stream.

The sieve works on disjoint segments so that segments can be handed to a
worker pool; each segment is a pure function of its bounds and the seed
primes, and the assembler re-emits results in segment order. Consumers
therefore see every prime up to the limit exactly once, ascending, no
matter how the range was segmented or how many workers ran.
"""

from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Iterator, Sequence

import numpy as np

DEFAULT_SEGMENT_SIZE = 1_000_000


@dataclass(frozen=True)
class SieveLimit:
    """Inclusive upper bound of a prime enumeration."""

    limit: int

    def __post_init__(self) -> None:
        if isinstance(self.limit, bool) or not isinstance(self.limit, int):
            raise ValueError(f"limit must be an integer, got {self.limit!r}")
        if self.limit < 2:
            raise ValueError(f"limit must be >= 2, got {self.limit}")
        if self.limit > sys.maxsize:
            raise ValueError(f"limit {self.limit} exceeds the addressable integer range")


@dataclass(frozen=True)
class Segment:
    """All primes inside the closed interval [lo, hi]."""

    lo: int
    hi: int
    primes: list[int]


def _seed_array(bound: int) -> np.ndarray:
    """Primes <= bound as an int64 array, by a plain full-range sieve."""
    if bound < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(bound + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(bound) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def seed_primes(bound: int) -> list[int]:
    """All primes <= bound, ascending.

    Intended for seed generation up to sqrt(limit); returns an empty list
    for bound < 2.
    """
    return _seed_array(bound).tolist()


def _segment_prime_array(lo: int, hi: int, seeds: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi] as an ascending int64 array.

    ``seeds`` must be ascending and contain every prime <= sqrt(hi).
    Only odd candidates are tracked; the prime 2 is emitted explicitly.
    """
    head = [2] if lo <= 2 <= hi else []
    start = max(lo, 3)
    if start % 2 == 0:
        start += 1
    if start > hi:
        return np.asarray(head, dtype=np.int64)
    count = (hi - start) // 2 + 1
    mask = np.ones(count, dtype=bool)
    for p in seeds:
        p = int(p)
        if p == 2:
            continue
        if p * p > hi:
            break
        first = max(p * p, ((start + p - 1) // p) * p)
        if first % 2 == 0:
            first += p
        if first > hi:
            continue
        mask[(first - start) // 2 :: p] = False
    odds = start + 2 * np.flatnonzero(mask).astype(np.int64)
    if head:
        return np.concatenate([np.asarray(head, dtype=np.int64), odds])
    return odds


def sieve_segment(lo: int, hi: int, seeds: Sequence[int]) -> Segment:
    """Sieve one segment [lo, hi] using the given seed primes.

    Pure function of its inputs, so segments may be sieved concurrently.
    Raises ValueError when the seed list misses a prime <= sqrt(hi).
    """
    if lo < 2:
        raise ValueError(f"segment lo must be >= 2, got {lo}")
    if lo > hi:
        raise ValueError(f"empty segment: lo={lo} > hi={hi}")
    seed_arr = np.asarray(sorted({int(p) for p in seeds}), dtype=np.int64)
    required = _seed_array(math.isqrt(hi))
    missing = np.setdiff1d(required, seed_arr, assume_unique=True)
    if missing.size:
        raise ValueError(
            f"seed list is missing prime {int(missing[0])} <= sqrt({hi})"
        )
    return Segment(lo=lo, hi=hi, primes=_segment_prime_array(lo, hi, seed_arr).tolist())


def segment_bounds(limit: int, segment_size: int) -> list[tuple[int, int]]:
    """Closed, disjoint [lo, hi] intervals covering [2, limit] in order."""
    if segment_size < 1:
        raise ValueError(f"segment_size must be >= 1, got {segment_size}")
    bounds = []
    lo = 2
    while lo <= limit:
        hi = min(lo + segment_size - 1, limit)
        bounds.append((lo, hi))
        lo = hi + 1
    return bounds


_WORKER_SEEDS: np.ndarray | None = None


def _init_sieve_worker(seeds: np.ndarray) -> None:
    global _WORKER_SEEDS
    _WORKER_SEEDS = seeds


def _sieve_worker(bounds: tuple[int, int]) -> np.ndarray:
    lo, hi = bounds
    return _segment_prime_array(lo, hi, _WORKER_SEEDS)


def iter_prime_arrays(
    limit: SieveLimit | int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int | None = 1,
) -> Iterator[np.ndarray]:
    """Yield the primes <= limit as one ascending int64 array per segment."""
    lim = limit.limit if isinstance(limit, SieveLimit) else SieveLimit(int(limit)).limit
    bounds = segment_bounds(lim, segment_size)
    seeds = _seed_array(math.isqrt(lim))
    if workers in (None, 0):
        workers = os.cpu_count() or 1
    if workers <= 1 or len(bounds) <= 2:
        for lo, hi in bounds:
            yield _segment_prime_array(lo, hi, seeds)
        return
    with Pool(
        processes=min(workers, len(bounds)),
        initializer=_init_sieve_worker,
        initargs=(seeds,),
    ) as pool:
        for arr in pool.imap(_sieve_worker, bounds):
            yield arr


def stream_primes(
    limit: SieveLimit | int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int | None = 1,
) -> Iterator[int]:
    """Every prime <= limit exactly once, in ascending order.

    The stream is identical for any segment_size >= 1 and any worker count.
    """
    for arr in iter_prime_arrays(limit, segment_size=segment_size, workers=workers):
        yield from arr.tolist()
