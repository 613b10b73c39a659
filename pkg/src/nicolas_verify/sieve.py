"""Odd-only segmented sieve of Eratosthenes delivering primes in indexed blocks.

Primes come out in ``PrimeBlock`` batches that carry the 1-based index of
their first entry, so downstream accumulators can detect desynchronisation.
Segments may be sieved on a thread pool; blocks are always handed over in
increasing order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterator, Optional

import numpy as np

from .errors import SieveExhausted

if TYPE_CHECKING:
    from .checkpoint import Checkpoint

DEFAULT_SEGMENT_SIZE = 1 << 18
MIN_SEGMENT_SIZE = 1024


@dataclass(frozen=True)
class SieveConfig:
    segment_size: int = DEFAULT_SEGMENT_SIZE
    limit: Optional[int] = None
    start_checkpoint: Optional["Checkpoint"] = None
    workers: int = 1

    def __post_init__(self):
        if self.segment_size < MIN_SEGMENT_SIZE:
            raise ValueError(f"segment_size must be >= {MIN_SEGMENT_SIZE}, got {self.segment_size}")
        if self.limit is not None and self.limit < 2:
            raise ValueError(f"limit must be >= 2, got {self.limit}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True, eq=False)
class PrimeBlock:
    first_index: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def __eq__(self, other):
        if not isinstance(other, PrimeBlock):
            return NotImplemented
        return self.first_index == other.first_index and np.array_equal(self.primes, other.primes)

    @property
    def last_index(self) -> int:
        return self.first_index + len(self.primes) - 1

    def head(self, count: int) -> "PrimeBlock":
        return PrimeBlock(self.first_index, self.primes[:count])


def small_primes(limit: int) -> np.ndarray:
    """Plain sieve of all primes <= limit."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


class _BasePrimes:
    """Odd base primes, grown on demand to cover sqrt of the sieve range."""

    def __init__(self):
        self.limit = 0
        self.primes = np.array([], dtype=np.int64)

    def ensure(self, high: int) -> np.ndarray:
        need = math.isqrt(max(high - 1, 0))
        if need > self.limit:
            # overshoot so unbounded streams rebuild rarely
            self.limit = max(need, 2 * self.limit)
            base = small_primes(self.limit)
            self.primes = base[base > 2]
        return self.primes


def sieve_segment(low: int, high: int, base: np.ndarray) -> np.ndarray:
    """Primes in [low, high), given all odd primes up to sqrt(high - 1)."""
    out = []
    if low <= 2 < high:
        out.append(np.array([2], dtype=np.int64))
    start = max(low, 3)
    if start % 2 == 0:
        start += 1
    if start >= high:
        return out[0] if out else np.array([], dtype=np.int64)
    count = (high - start + 1) // 2
    mask = np.ones(count, dtype=bool)
    for p in base.tolist():
        p2 = p * p
        if p2 >= high:
            break
        first = max(p2, ((start + p - 1) // p) * p)
        if first % 2 == 0:
            first += p
        if first < high:
            mask[(first - start) // 2 :: p] = False
    out.append(start + 2 * np.flatnonzero(mask).astype(np.int64))
    return np.concatenate(out) if len(out) > 1 else out[0]


@dataclass
class SieveCursor:
    """Position of a prime stream: next integer to sieve and next prime index."""

    low: int = 2
    next_index: int = 1
    _base: _BasePrimes = field(default_factory=_BasePrimes, repr=False, compare=False)

    @classmethod
    def after(cls, n: int, p_n: int) -> "SieveCursor":
        """Cursor positioned just past the n-th prime ``p_n``."""
        if n == 0:
            return cls()
        return cls(low=p_n + 1, next_index=n + 1)

    @classmethod
    def from_config(cls, config: SieveConfig) -> "SieveCursor":
        ck = config.start_checkpoint
        if ck is None:
            return cls()
        return cls.after(ck.n, ck.p_n)


def _segment_bounds(config: SieveConfig, low: int) -> tuple[int, int]:
    high = low + config.segment_size
    if config.limit is not None:
        high = min(high, config.limit + 1)
    return low, high


def next_block(config: SieveConfig, cursor: SieveCursor) -> PrimeBlock:
    """Sieve the next segment and advance ``cursor`` past it.

    Raises SieveExhausted once the cursor has passed ``config.limit``.
    """
    if config.limit is not None and cursor.low > config.limit:
        raise SieveExhausted(f"prime limit {config.limit} reached")
    low, high = _segment_bounds(config, cursor.low)
    primes = sieve_segment(low, high, cursor._base.ensure(high))
    block = PrimeBlock(cursor.next_index, primes)
    cursor.low = high
    cursor.next_index += len(primes)
    return block


def iter_blocks(config: SieveConfig, cursor: Optional[SieveCursor] = None) -> Iterator[PrimeBlock]:
    """Yield consecutive blocks until the limit (forever if there is none).

    With ``config.workers > 1`` segments are sieved concurrently in waves of
    ``workers`` segments; delivery order is unchanged.
    """
    if cursor is None:
        cursor = SieveCursor.from_config(config)
    if config.workers == 1:
        while True:
            try:
                yield next_block(config, cursor)
            except SieveExhausted:
                return
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        while config.limit is None or cursor.low <= config.limit:
            bounds = []
            low = cursor.low
            for _ in range(config.workers):
                if config.limit is not None and low > config.limit:
                    break
                lo, hi = _segment_bounds(config, low)
                bounds.append((lo, hi))
                low = hi
            base = cursor._base.ensure(bounds[-1][1])
            for (lo, hi), primes in zip(bounds, pool.map(lambda b: sieve_segment(b[0], b[1], base), bounds)):
                block = PrimeBlock(cursor.next_index, primes)
                cursor.low = hi
                cursor.next_index += len(primes)
                yield block


def iter_primes(config: Optional[SieveConfig] = None, cursor: Optional[SieveCursor] = None) -> Iterator[int]:
    for block in iter_blocks(config or SieveConfig(), cursor):
        yield from block.primes.tolist()


def first_primes(count: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> np.ndarray:
    """The first ``count`` primes as an int64 array."""
    chunks, have = [], 0
    for block in iter_blocks(SieveConfig(segment_size=segment_size)):
        if have >= count:
            break
        chunks.append(block.primes[: count - have])
        have += len(chunks[-1])
    return np.concatenate(chunks) if chunks else np.array([], dtype=np.int64)
