"""Find the Catalan index whose value has a requested decimal length.

log10 C(n) is approximated by n*log10(4) - 1.5*log10(n) - 0.5*log10(pi),
which is strictly increasing in n and overshoots the true value (the
next correction term is negative), so the n range predicted to have D
digits can be located by monotone search. Candidates are then confirmed
exactly: small indices by expanding the factorization, mid-size ones by
the exact digit estimate. Beyond the confirmation limits the prediction
is returned unconfirmed.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2

from .factorization import estimate_digits, factorize
from .reconstruct import decimal_digit_count, expand_factorization
from .sieve import DEFAULT_SEGMENT_SIZE
from .valuation import RatioSpec

LOG_PRECISION = 200

TIER_RECONSTRUCTION = "reconstruction"
TIER_ESTIMATE = "digit-estimate"
TIER_ASYMPTOTIC = "asymptotic"

DEFAULT_RECONSTRUCT_LIMIT = 10_000
DEFAULT_ESTIMATE_LIMIT = 100_000_000


@dataclass(frozen=True)
class DigitTarget:
    """A requested decimal length."""

    digits: int

    def __post_init__(self) -> None:
        if self.digits < 1:
            raise ValueError(f"digit target must be >= 1, got {self.digits}")


@dataclass(frozen=True)
class CandidateSolution:
    """An index n whose Catalan number has (or should have) the target length."""

    n: int
    predicted_log10: object  # gmpy2.mpfr, >= 60 fractional bits
    confirmed: bool
    method: str


def log10_catalan_asymptotic(n: int) -> "gmpy2.mpfr":
    """First-order approximation of log10 C(n) for n >= 1.

    Computed at 200-bit precision; the absolute error of the returned
    arithmetic is far below the approximation's own O(1/n) error term.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    with gmpy2.context(precision=LOG_PRECISION):
        x = gmpy2.mpfr(gmpy2.mpz(n))
        return (
            x * gmpy2.log10(gmpy2.mpfr(4))
            - gmpy2.mpfr("1.5") * gmpy2.log10(x)
            - gmpy2.log10(gmpy2.const_pi()) / 2
        )


def _first_n_with_asymptotic_at_least(threshold: int) -> int:
    """Smallest n >= 1 with log10_catalan_asymptotic(n) >= threshold."""
    if log10_catalan_asymptotic(1) >= threshold:
        return 1
    hi = 2
    while log10_catalan_asymptotic(hi) < threshold:
        hi *= 2
    lo = hi // 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if log10_catalan_asymptotic(mid) >= threshold:
            hi = mid
        else:
            lo = mid
    return hi


def exact_catalan_digits(
    n: int,
    *,
    reconstruct_limit: int = DEFAULT_RECONSTRUCT_LIMIT,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int | None = 1,
) -> tuple[int, str, bool]:
    """Exact decimal length of C(n) plus the method used to obtain it.

    Small n are expanded outright; larger ones use the factorization's
    digit estimate, which is exact while its boundary flag stays clear.
    """
    f = factorize(RatioSpec.catalan(n), segment_size=segment_size, workers=workers)
    if n <= reconstruct_limit:
        return decimal_digit_count(expand_factorization(f)), TIER_RECONSTRUCTION, True
    est = estimate_digits(f)
    return est.digits, TIER_ESTIMATE, not est.boundary_flag


def solve_target_digits(
    target: DigitTarget | int,
    *,
    reconstruct_limit: int = DEFAULT_RECONSTRUCT_LIMIT,
    estimate_limit: int = DEFAULT_ESTIMATE_LIMIT,
    list_all: bool = False,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int | None = 1,
) -> CandidateSolution | list[CandidateSolution] | None:
    """Find n such that C(n) has exactly the requested number of digits.

    Within the confirmation limits, candidates are checked exactly in
    ascending order and the smallest match is returned (list_all returns
    every match). Beyond them the asymptotic prediction is returned
    unconfirmed; when consecutive indices share the predicted length, the
    smallest one whose predicted log10 clears the lower digit boundary by
    at least 0.5 is preferred, since that margin dwarfs the one-sided
    approximation error. Returns None if no index hits the target.
    """
    if isinstance(target, int):
        target = DigitTarget(target)
    digits = target.digits

    # the approximation overshoots the true log10, so indices below
    # first_n cannot reach `digits` and scanning can start there
    first_n = _first_n_with_asymptotic_at_least(digits - 1)
    end_n = _first_n_with_asymptotic_at_least(digits)

    if end_n - 1 <= estimate_limit:
        matches: list[CandidateSolution] = []
        candidates = list(range(first_n, end_n + 4))
        if digits == 1:
            candidates = [0] + candidates
        for n in candidates:
            if n == 0:
                d, method, confirmed = 1, TIER_RECONSTRUCTION, True
            else:
                d, method, confirmed = exact_catalan_digits(
                    n,
                    reconstruct_limit=reconstruct_limit,
                    segment_size=segment_size,
                    workers=workers,
                )
            if d == digits:
                predicted = log10_catalan_asymptotic(n) if n >= 1 else gmpy2.mpfr(0)
                matches.append(CandidateSolution(n, predicted, confirmed, method))
                if not list_all:
                    return matches[0]
            elif d > digits:
                break
        if list_all:
            return matches
        return None

    candidates = list(range(first_n, end_n))
    solutions = []
    for n in candidates:
        predicted = log10_catalan_asymptotic(n)
        fraction = predicted - gmpy2.floor(predicted)
        solutions.append((n, predicted, float(fraction)))
    if not solutions:
        return [] if list_all else None
    all_solutions = [
        CandidateSolution(n, predicted, False, TIER_ASYMPTOTIC) for n, predicted, _ in solutions
    ]
    if list_all:
        return all_solutions
    for sol, (_, _, fraction) in zip(all_solutions, solutions):
        if fraction >= 0.5:
            return sol
    return all_solutions[-1]
