"""High-precision base-10 logarithms accumulated in integer fixed point.

Digit counts of huge integers are decided from sums of log10 terms, so the
terms are evaluated with 200-bit MPFR arithmetic (correctly rounded) and
accumulated as integers scaled by 2**FRAC_BITS. Integer accumulation is
exact and order-independent, which keeps digit estimates bit-identical
across segmentation and worker counts. A per-term absolute error bound is
carried alongside so callers can tell when a floor crossing is provable.
"""

from __future__ import annotations

import gmpy2

FRAC_BITS = 128
LOG_PRECISION = 200

_FRAC_ONE = 1 << FRAC_BITS
# conversion to mpfr plus one correctly rounded log10: a few ulps at
# LOG_PRECISION bits, bounded generously by 2**-(LOG_PRECISION - 3)
_REL_ERR = 2.0 ** (-(LOG_PRECISION - 3))


def fixed_point_log10(x) -> tuple[int, float]:
    """log10(x) for an exact integer x >= 1 as (fixed, error_bound).

    ``fixed`` is round-to-nearest at FRAC_BITS fractional bits and
    ``error_bound`` bounds |fixed / 2**FRAC_BITS - log10(x)|.
    """
    x = gmpy2.mpz(x)
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    if x == 1:
        return 0, 0.0
    with gmpy2.context(precision=LOG_PRECISION):
        t = gmpy2.log10(gmpy2.mpfr(x))
        mantissa, exp = t.as_mantissa_exp()
        magnitude = abs(float(t))
    shift = int(exp) + FRAC_BITS
    if shift >= 0:
        fixed = int(mantissa) << shift
        quant_err = 0.0
    else:
        half = 1 << (-shift - 1)
        fixed = (int(mantissa) + half) >> (-shift)
        quant_err = 2.0 ** (-(FRAC_BITS + 1))
    return fixed, quant_err + max(1.0, magnitude) * _REL_ERR


def fixed_floor(fixed: int) -> int:
    """Integer part of a nonnegative fixed-point value."""
    return fixed >> FRAC_BITS


def fixed_fraction(fixed: int) -> int:
    """Fractional part of a fixed-point value, still scaled by 2**FRAC_BITS."""
    return fixed & (_FRAC_ONE - 1)


def error_to_fixed(error_bound: float) -> int:
    """Upper-round an absolute error bound onto the fixed-point grid.

    A bound of exactly zero (an empty or error-free accumulation) stays
    zero, so provably exact sums never look boundary-ambiguous.
    """
    if error_bound <= 0.0:
        return 0
    scaled = error_bound * float(_FRAC_ONE)
    return int(scaled) + 1
