"""p-adic valuations of factorials and ratios of factorial products.

The exponent of a prime p in m! is the finite sum of floor(m / p^k) over
k >= 1. Everything else here is bookkeeping on top of that identity: the
Catalan exponent v_p((2n)!) - 2 v_p(n!) - v_p(n+1), and its generalization
to an arbitrary ratio prod(a_i!) / prod(b_j!) where the net exponent of p
is the signed sum of the per-factorial valuations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import InternalInconsistencyError
from .sieve import _seed_array


def legendre(m: int, p: int) -> int:
    """Exponent of the prime p in m! (0! = 1 gives 0)."""
    if p < 2:
        raise ValueError(f"p must be a prime >= 2, got {p}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    total = 0
    q = p
    while q <= m:
        total += m // q
        q *= p
    return total


def valuation_of_integer(m: int, p: int) -> int:
    """Largest c such that p**c divides m (m >= 1)."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if p < 2:
        raise ValueError(f"p must be a prime >= 2, got {p}")
    c = 0
    while m % p == 0:
        m //= p
        c += 1
    return c


class ValuationTriple(NamedTuple):
    """The three valuations entering the Catalan exponent identity."""

    a: int  # v_p((2n)!)
    b: int  # v_p(n!)
    c: int  # v_p(n+1)


def catalan_valuations(n: int, p: int) -> ValuationTriple:
    """v_p((2n)!), v_p(n!) and v_p(n+1) for the Catalan number C(n)."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return ValuationTriple(
        a=legendre(2 * n, p),
        b=legendre(n, p),
        c=valuation_of_integer(n + 1, p),
    )


def catalan_exponent(n: int, p: int) -> int:
    """Exponent of p in C(n) = (2n)! / (n! (n+1)!).

    Primes above sqrt(2n) have single-term Legendre sums, so the exponent
    collapses to floor(2n/p) - 2*floor(n/p) minus the n+1 correction; in
    particular for n < p <= 2n it is 0 or 1. Primes above 2n contribute 0.
    A negative result would contradict the integrality of C(n) and raises
    InternalInconsistencyError.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if p < 2:
        raise ValueError(f"p must be a prime >= 2, got {p}")
    if p > 2 * n:
        return 0
    if p * p > 2 * n:
        e = 2 * n // p - 2 * (n // p) - valuation_of_integer(n + 1, p)
    else:
        a, b, c = catalan_valuations(n, p)
        e = a - 2 * b - c
    if e < 0:
        raise InternalInconsistencyError(
            f"negative Catalan exponent {e} for n={n}, p={p}"
        )
    return e


@dataclass(frozen=True)
class RatioSpec:
    """A ratio of factorial products: prod(a_i!) / prod(b_j!).

    Either side may be empty (an empty product is 1), but not both.
    The Catalan number C(n) is the special case (2n,) over (n, n+1).
    """

    numerator_args: tuple[int, ...]
    denominator_args: tuple[int, ...]

    def __post_init__(self) -> None:
        num = tuple(int(a) for a in self.numerator_args)
        den = tuple(int(b) for b in self.denominator_args)
        object.__setattr__(self, "numerator_args", num)
        object.__setattr__(self, "denominator_args", den)
        if not num and not den:
            raise ValueError("at least one factorial argument is required")
        if any(a < 0 for a in num + den):
            raise ValueError("factorial arguments must be >= 0")

    @classmethod
    def catalan(cls, n: int) -> "RatioSpec":
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        return cls((2 * n,), (n, n + 1))

    @classmethod
    def binomial(cls, n: int, k: int) -> "RatioSpec":
        if not 0 <= k <= n:
            raise ValueError(f"binomial requires 0 <= k <= n, got n={n}, k={k}")
        return cls((n,), (k, n - k))

    @classmethod
    def multinomial(cls, n: int, parts: Sequence[int]) -> "RatioSpec":
        parts = tuple(int(x) for x in parts)
        if sum(parts) != n:
            raise ValueError(f"multinomial parts {parts} do not sum to {n}")
        return cls((n,), parts)

    @property
    def max_argument(self) -> int:
        return max(self.numerator_args + self.denominator_args)

    @property
    def catalan_n(self) -> int | None:
        """n when this spec has exactly the Catalan shape, else None."""
        if len(self.numerator_args) == 1 and len(self.denominator_args) == 2:
            lo, hi = sorted(self.denominator_args)
            if hi == lo + 1 and self.numerator_args[0] == 2 * lo:
                return lo
        return None

    @property
    def binomial_nk(self) -> tuple[int, int] | None:
        """(n, k) when this spec has the binomial shape, else None."""
        if self.catalan_n is not None:
            return None
        if len(self.numerator_args) == 1 and len(self.denominator_args) == 2:
            n = self.numerator_args[0]
            k, j = sorted(self.denominator_args)
            if k + j == n:
                return (n, k)
        return None

    @property
    def display_name(self) -> str:
        n = self.catalan_n
        if n is not None:
            return f"Catalan({n})"
        nk = self.binomial_nk
        if nk is not None:
            return f"Binomial({nk[0]},{nk[1]})"
        num = ",".join(map(str, self.numerator_args))
        den = ",".join(map(str, self.denominator_args))
        return f"FactorialRatio([{num}]/[{den}])"

    @property
    def label(self) -> str:
        """Short slug used for output file names."""
        n = self.catalan_n
        if n is not None:
            return f"catalan_{n}"
        nk = self.binomial_nk
        if nk is not None:
            return f"binomial_{nk[0]}_{nk[1]}"
        num = "-".join(map(str, self.numerator_args)) or "1"
        den = "-".join(map(str, self.denominator_args)) or "1"
        return f"ratio_{num}_over_{den}"


def ratio_exponent(spec: RatioSpec, p: int) -> int:
    """Net exponent of p in the ratio; may be negative.

    A negative value means the ratio is not an integer. This layer reports
    the signed value; the factorization pipeline turns negatives into a
    NonIntegralRatioError.
    """
    if p < 2:
        raise ValueError(f"p must be a prime >= 2, got {p}")
    e = 0
    for a in spec.numerator_args:
        e += legendre(a, p)
    for b in spec.denominator_args:
        e -= legendre(b, p)
    return e


def factor_by_trial_division(m: int, primes: Sequence[int]) -> dict[int, int]:
    """Factor m by trial division with an ascending prime list.

    The list must contain every prime <= sqrt(m) (checked); any residual
    cofactor above sqrt(m) is then prime and is included with exponent 1.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    supplied = {int(p) for p in primes}
    for p in _seed_array(math.isqrt(m)).tolist():
        if p not in supplied:
            raise ValueError(f"prime list is missing {p} <= sqrt({m})")
    factors: dict[int, int] = {}
    rest = m
    for p in sorted(supplied):
        if p * p > rest:
            break
        c = 0
        while rest % p == 0:
            rest //= p
            c += 1
        if c:
            factors[p] = c
    if rest > 1:
        factors[rest] = 1
    return factors
