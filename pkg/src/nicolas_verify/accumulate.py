"""Running theta and log-Mertens sums over the prime stream.

Primorials are never materialised. With N_k the product of the first k
primes, ``log N_k`` is ``theta`` and ``log(N_k / phi(N_k))`` is
``-mertens_log``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .errors import IndexGapError
from .sieve import PrimeBlock


@dataclass
class CompensatedSum:
    """Neumaier-compensated running sum.

    The true total is approximated by ``sum + compensation``; the error after
    folding terms x_i is bounded by about 2u|S| + O(n u^2) sum|x_i|.
    """

    sum: float = 0.0
    compensation: float = 0.0

    def add(self, term: float) -> None:
        s = self.sum
        t = s + term
        if abs(s) >= abs(term):
            self.compensation += (s - t) + term
        else:
            self.compensation += (term - t) + s
        self.sum = t

    def extend(self, terms: Iterable[float]) -> "CompensatedSum":
        for term in terms:
            self.add(term)
        return self

    def value(self) -> float:
        return self.sum + self.compensation

    def copy(self) -> "CompensatedSum":
        return CompensatedSum(self.sum, self.compensation)


def log_one_minus_inv(p: int) -> float:
    """log(1 - 1/p) without cancellation for large p."""
    return math.log1p(-1.0 / p)


@dataclass
class ThetaMertensState:
    """theta(p_n) and sum_{k<=n} log(1 - 1/p_k) after folding the first n primes."""

    n: int = 0
    p_n: int = 0
    theta: CompensatedSum = field(default_factory=CompensatedSum)
    mertens_log: CompensatedSum = field(default_factory=CompensatedSum)

    def add_prime(self, p: int) -> None:
        self.theta.add(math.log(p))
        self.mertens_log.add(log_one_minus_inv(p))
        self.n += 1
        self.p_n = p

    @property
    def theta_value(self) -> float:
        return self.theta.value()

    @property
    def mertens_value(self) -> float:
        return self.mertens_log.value()

    @property
    def mertens_product(self) -> float:
        """prod_{k<=n} (1 - 1/p_k)."""
        return math.exp(self.mertens_log.value())

    def copy(self) -> "ThetaMertensState":
        return ThetaMertensState(self.n, self.p_n, self.theta.copy(), self.mertens_log.copy())

    def same_bits(self, other: "ThetaMertensState") -> bool:
        pairs = [
            (self.theta.sum, other.theta.sum),
            (self.theta.compensation, other.theta.compensation),
            (self.mertens_log.sum, other.mertens_log.sum),
            (self.mertens_log.compensation, other.mertens_log.compensation),
        ]
        return (
            self.n == other.n
            and self.p_n == other.p_n
            and all(a.hex() == b.hex() for a, b in pairs)
        )


def extend(state: ThetaMertensState, block: PrimeBlock) -> ThetaMertensState:
    """Fold ``block`` into a copy of ``state`` and return it.

    The block must start at prime index ``state.n + 1``; empty blocks are a
    no-op regardless of their index.
    """
    if len(block) == 0:
        return state.copy()
    if block.first_index != state.n + 1:
        raise IndexGapError(
            f"block starts at index {block.first_index}, state is at n={state.n}"
        )
    out = state.copy()
    for p in block.primes.tolist():
        out.add_prime(p)
    return out
