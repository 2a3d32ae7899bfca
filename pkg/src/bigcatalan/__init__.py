"""Exact huge Catalan numbers and factorial ratios via prime exponents.

Phase 1 sieves primes and computes each prime's net exponent in the
target ratio, grouping primes by exponent into a serializable
factorization. Phase 2 rebuilds the exact integer with chunked balanced
product trees under an optional memory budget. A digit-target solver and
a verification toolkit sit alongside the two phases.
"""

from .errors import (
    BigCatalanError,
    FactorizationParseError,
    InternalInconsistencyError,
    NonIntegralRatioError,
    ResourceBudgetError,
    VerificationError,
)
from .factorization import (
    DigitEstimate,
    ExponentGroup,
    Factorization,
    estimate_digits,
    factorize,
    parse,
    read_factorization_file,
    serialize,
    write_factorization_file,
)
from .reconstruct import (
    ChunkPolicy,
    Natural,
    ReconstructionResult,
    balanced_product,
    decimal_digit_count,
    expand_factorization,
    power,
    read_binary,
    reconstruct,
    write_binary,
    write_decimal,
)
from .sieve import SieveLimit, Segment, seed_primes, sieve_segment, stream_primes
from .target import (
    CandidateSolution,
    DigitTarget,
    log10_catalan_asymptotic,
    solve_target_digits,
)
from .valuation import (
    RatioSpec,
    ValuationTriple,
    catalan_exponent,
    catalan_valuations,
    factor_by_trial_division,
    legendre,
    ratio_exponent,
    valuation_of_integer,
)
from .verify import (
    DEFAULT_MODULI,
    ExpectedClaims,
    VerificationReport,
    audit_factorization,
    modular_value,
    sha256_of_file,
    verify_result,
)

__version__ = "0.1.0"

__all__ = [
    "BigCatalanError",
    "CandidateSolution",
    "ChunkPolicy",
    "DEFAULT_MODULI",
    "DigitEstimate",
    "DigitTarget",
    "ExpectedClaims",
    "ExponentGroup",
    "Factorization",
    "FactorizationParseError",
    "InternalInconsistencyError",
    "Natural",
    "NonIntegralRatioError",
    "RatioSpec",
    "ReconstructionResult",
    "ResourceBudgetError",
    "Segment",
    "SieveLimit",
    "ValuationTriple",
    "VerificationError",
    "VerificationReport",
    "audit_factorization",
    "balanced_product",
    "catalan_exponent",
    "catalan_valuations",
    "decimal_digit_count",
    "estimate_digits",
    "expand_factorization",
    "factor_by_trial_division",
    "factorize",
    "legendre",
    "log10_catalan_asymptotic",
    "modular_value",
    "parse",
    "power",
    "ratio_exponent",
    "read_binary",
    "read_factorization_file",
    "reconstruct",
    "seed_primes",
    "serialize",
    "sha256_of_file",
    "sieve_segment",
    "solve_target_digits",
    "stream_primes",
    "valuation_of_integer",
    "verify_result",
    "write_binary",
    "write_decimal",
    "write_factorization_file",
]
