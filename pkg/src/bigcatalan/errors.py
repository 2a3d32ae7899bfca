"""Exception hierarchy shared by all pipeline stages."""


class BigCatalanError(Exception):
    """Base class for all errors raised by this package."""


class NonIntegralRatioError(BigCatalanError):
    """A factorial ratio turned out not to be an integer.

    Carries the first prime whose net exponent went negative.
    """

    def __init__(self, prime: int, exponent: int):
        self.prime = int(prime)
        self.exponent = int(exponent)
        super().__init__(
            f"ratio is not integral: prime {self.prime} has net exponent {self.exponent}"
        )

    def __reduce__(self):
        # keep the two-argument signature picklable across worker processes
        return (NonIntegralRatioError, (self.prime, self.exponent))


class InternalInconsistencyError(BigCatalanError):
    """An invariant that is a theorem was violated; indicates a bug."""


class FactorizationParseError(BigCatalanError):
    """A factorization file does not conform to the text format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceBudgetError(BigCatalanError):
    """A memory or disk budget was exceeded and could not be worked around."""


class VerificationError(BigCatalanError):
    """A verification input is unusable (missing, empty or unreadable)."""
