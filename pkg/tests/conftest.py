import pytest

from oracles import catalan_recurrence, trial_division_primes


@pytest.fixture(scope="session")
def catalan_table() -> list[int]:
    """C(0..2000) from the integer recurrence."""
    return catalan_recurrence(2000)


@pytest.fixture(scope="session")
def trial_primes_million() -> list[int]:
    """Primes up to 10**6 certified by trial division (slow, built once)."""
    return trial_division_primes(10**6)
