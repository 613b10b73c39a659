import math

import pytest
from mpmath import mp, mpf

ACCEPTANCE_LINES = []


def trial_division_primes(count):
    """First ``count`` primes by trial division; independent of the sieve."""
    primes = []
    k = 2
    while len(primes) < count:
        r = math.isqrt(k)
        if all(k % p for p in primes if p <= r):
            primes.append(k)
        k += 1
    return primes


def is_prime(k):
    if k < 2:
        return False
    return all(k % d for d in range(2, math.isqrt(k) + 1))


def mp_prefix_sums(primes, dps=40):
    """High-precision (theta, mertens_log) after each prime."""
    out = []
    with mp.workdps(dps):
        th, m = mpf(0), mpf(0)
        for p in primes:
            th += mp.log(p)
            m += mp.log(1 - mpf(1) / p)
            out.append((+th, +m))
    return out


@pytest.fixture(scope="session")
def first_10k_primes():
    return trial_division_primes(10_000)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
