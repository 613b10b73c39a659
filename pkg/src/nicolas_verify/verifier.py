"""Sweeps and diagnostics over the prime stream.

Everything here reports measured numbers: margins and their running minimum,
residuals of the limit statements, the f(x) < x + log x crossover, the
q-recurrence checked along two algebraic routes, theta(p_n)/p_n and mean
prime gaps. A finite sweep never establishes a statement "for all n".
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .accumulate import ThetaMertensState
from .constants import EXP_NEG_GAMMA, GAMMA
from .errors import BracketError, DomainError, NicolasVerifyError
from .functions import (
    b_of,
    f_of,
    iterate_f,
    q_from_state,
    recurrence_rhs_literal,
    recurrence_rhs_simplified,
)
from .sieve import SieveConfig, SieveCursor, iter_blocks

log = logging.getLogger(__name__)

LEMMA_IDS = ("L1-b", "L1-f-plus", "L1-f-minus", "L2", "L3", "L4")


def walk_states(
    n_max: int,
    start: Optional[ThetaMertensState] = None,
    config: Optional[SieveConfig] = None,
) -> Iterator[ThetaMertensState]:
    """Fold primes one at a time up to index n_max, yielding the state after each.

    The same state object is yielded every time; copy it to keep a snapshot.
    """
    state = start.copy() if start is not None else ThetaMertensState()
    if state.n >= n_max:
        return
    config = config or SieveConfig()
    cursor = SieveCursor.after(state.n, state.p_n)
    for block in iter_blocks(config, cursor):
        for p in block.primes.tolist():
            state.add_prime(p)
            yield state
            if state.n >= n_max:
                return


# --- Nicolas margins -------------------------------------------------------


@dataclass(frozen=True)
class NicolasRecord:
    n: int
    p_n: int
    theta: float
    lhs: float
    margin: float
    q: float
    # undefined (None) while log(theta) <= 0, i.e. n = 1
    ratio_form_margin: Optional[float]


def nicolas_record(state: ThetaMertensState) -> NicolasRecord:
    theta = state.theta_value
    m = state.mertens_value
    lhs = math.log(theta) * math.exp(m)
    ratio_form = None
    if theta > 1.0:
        ratio_form = -m - GAMMA - math.log(math.log(theta))
    return NicolasRecord(
        n=state.n,
        p_n=state.p_n,
        theta=theta,
        lhs=lhs,
        margin=EXP_NEG_GAMMA - lhs,
        q=q_from_state(state).q,
        ratio_form_margin=ratio_form,
    )


class NicolasSweep:
    """Margin sweep e^-gamma - log(theta(p_n)) * prod(1 - 1/p_k) over n <= n_max.

    Iterating yields a record at every ``stride``-th index and at each index
    where the margin sets a new running minimum. After iteration, ``state``
    holds the final accumulator, ``min_n``/``min_margin`` the global minimum
    and ``failures``/``sign_mismatches`` list any offending indices.

    Pass ``start`` plus the previous ``min_margin``/``min_n`` to resume; the
    resumed rows then continue the single-shot run exactly.
    """

    def __init__(
        self,
        n_max: int,
        stride: int = 1,
        start: Optional[ThetaMertensState] = None,
        min_margin: float = math.inf,
        min_n: int = 0,
        config: Optional[SieveConfig] = None,
    ):
        if n_max < 1 or stride < 1:
            raise DomainError("n_max and stride must be >= 1")
        self.n_max = n_max
        self.stride = stride
        self.state = start.copy() if start is not None else ThetaMertensState()
        self.config = config
        self.min_margin = min_margin
        self.min_n = min_n
        self.min_record: Optional[NicolasRecord] = None
        self.failures: list[int] = []
        self.sign_mismatches: list[int] = []
        self.checked = 0

    def __iter__(self) -> Iterator[NicolasRecord]:
        for state in walk_states(self.n_max, self.state, self.config):
            rec = nicolas_record(state)
            self.checked += 1
            if not (rec.margin > 0.0 and rec.q > 0.0):
                self.failures.append(rec.n)
            if (rec.margin > 0.0) != (rec.q > 0.0) or (
                rec.ratio_form_margin is not None and (rec.margin > 0.0) != (rec.ratio_form_margin > 0.0)
            ):
                self.sign_mismatches.append(rec.n)
            new_min = rec.margin < self.min_margin
            if new_min:
                self.min_margin, self.min_n, self.min_record = rec.margin, rec.n, rec
            if new_min or rec.n % self.stride == 0:
                yield rec
            self.state = state
        self.state = self.state.copy()

    def run(self) -> list[NicolasRecord]:
        return list(self)

    def extras(self) -> dict[str, float]:
        """Running-minimum fields to store in a checkpoint for resumption."""
        return {"min_margin": self.min_margin, "min_n": float(self.min_n)}


def nicolas_sweep(n_max: int, stride: int = 1, **kwargs) -> NicolasSweep:
    return NicolasSweep(n_max, stride, **kwargs)


# --- limit-lemma residuals -------------------------------------------------


@dataclass(frozen=True)
class ResidualSample:
    lemma_id: str
    x: float
    residual: float


def log1p_tail(t: float, order: int) -> float:
    """log1p(t) minus its Taylor polynomial of degree order-1, for |t| <= 1/2.

    Summed as a series so the leading cancellation never happens in floating
    point; for t = log(x)/x with x > 1 we always have t <= 1/e.
    """
    if abs(t) > 0.5:
        head = sum((-1) ** (k + 1) * t**k / k for k in range(1, order))
        return math.log1p(t) - head
    total = 0.0
    term = t ** order
    k = order
    while True:
        piece = (-1) ** (k + 1) * term / k
        total += piece
        if abs(piece) <= 1e-18 * abs(total) or k > 200:
            return total
        term *= t
        k += 1


def residual_at(lemma_id: str, x: float) -> float:
    """Residual of one lemma expression at x, rearranged to avoid cancellation.

    L1-*  x**(1 + 1/g) - x - log x as x*expm1(log(x)/g) - log x
    L2    x*(x*log(1 + t) - log x) + log(x)**2/2 = x**2 * (log1p(t) - t + t**2/2), t = log(x)/x
    L3    log(x)/2 - b + x, with b - x = x*(t - log1p(t))/log1p(t)
    L4    f(x) - x - log x, using the solver's directly computed excess
    """
    if not x > 1.0:
        raise DomainError(f"residuals need x > 1 (got {x})")
    L = math.log(x)
    t = L / x
    if lemma_id == "L1-b":
        return x * math.expm1(L / b_of(x)) - L
    if lemma_id == "L1-f-plus":
        return x * math.expm1(L / (f_of(x).f - 1.0)) - L
    if lemma_id == "L1-f-minus":
        # exponent 1 - 1/(f - 1), as printed in the theta ~ p_n argument
        return x * math.expm1(-L / (f_of(x).f - 1.0)) - L
    if lemma_id == "L2":
        return x * x * log1p_tail(t, 3)
    if lemma_id == "L3":
        return L / 2 + x * log1p_tail(t, 2) / math.log1p(t)
    if lemma_id == "L4":
        return f_of(x).excess - L
    raise ValueError(f"unknown lemma id {lemma_id!r}")


def lemma_residuals(
    grid: Sequence[float],
    which: Iterable[str] = LEMMA_IDS,
    backend: str = "standard",
) -> list[ResidualSample]:
    """Evaluate the requested residuals on ``grid``.

    Samples that raise a domain or convergence error are logged and skipped.
    ``backend="extended"`` evaluates the expressions literally in mpmath.
    """
    which = list(which)
    unknown = set(which) - set(LEMMA_IDS)
    if unknown:
        raise ValueError(f"unknown lemma ids: {sorted(unknown)}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("grid must be strictly increasing")
    if backend == "standard":
        evaluate = residual_at
    elif backend == "extended":
        from .extended import residual_mp

        evaluate = lambda lemma, x: float(residual_mp(lemma, x))
    else:
        raise ValueError(f"unknown precision backend {backend!r}")

    out = []
    for lemma in which:
        for x in grid:
            try:
                r = evaluate(lemma, float(x))
            except NicolasVerifyError as exc:
                log.warning("skipping %s at x=%g: %s", lemma, x, exc)
                continue
            if math.isfinite(r):
                out.append(ResidualSample(lemma, float(x), r))
            else:
                log.warning("skipping %s at x=%g: non-finite residual", lemma, x)
    return out


def decade_grid(lo_exp: int, hi_exp: int, per_decade: int = 1) -> list[float]:
    """Geometric grid 10**lo_exp .. 10**hi_exp with ``per_decade`` points per decade."""
    steps = (hi_exp - lo_exp) * per_decade
    return [10.0 ** (lo_exp + k / per_decade) for k in range(steps + 1)]


# --- f(x) < x + log x crossover --------------------------------------------


def _e4(x: float) -> float:
    return f_of(x).excess - math.log(x)


def gym_crossover_search(lo: float = math.e, hi: float = 100.0, tol: float = 1e-6) -> float:
    """Bisect for the sign change of f(x) - x - log(x) inside [lo, hi]."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    e_lo, e_hi = _e4(lo), _e4(hi)
    if not (e_lo > 0.0 > e_hi):
        raise BracketError(f"f(x) - x - log x does not go from + to - on [{lo}, {hi}]: {e_lo:.3g}, {e_hi:.3g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _e4(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SignCertificate:
    """Sampled (not proved) evidence that f(x) - x - log x < 0 on (start, upper]."""

    start: float
    upper: float
    samples: int
    all_negative: bool
    max_residual: float


def sampled_sign_certificate(start: float, upper: float = 1e6, per_decade: int = 20) -> SignCertificate:
    xs = []
    x = start * 10 ** (1 / per_decade)
    while x < upper:
        xs.append(x)
        x *= 10 ** (1 / per_decade)
    k = math.ceil(math.log10(start))
    xs += [10.0**j for j in range(max(k, 1), int(round(math.log10(upper))) + 1)]
    xs = sorted(set(xs))
    values = [_e4(x) for x in xs]
    return SignCertificate(start, upper, len(xs), all(v < 0.0 for v in values), max(values))


# --- q-recurrence ------------------------------------------------------------


@dataclass(frozen=True)
class RecurrenceResidual:
    u: int
    direct_q_next: float
    literal_rhs: float
    simplified_rhs: float
    residual_literal: float
    residual_paths: float


@dataclass(frozen=True)
class RecurrenceSummary:
    count: int
    max_abs_literal: float
    max_rel_literal: float
    max_abs_paths: float
    max_rel_paths: float


def recurrence_check_sweep(
    u_range: Iterable[int], config: Optional[SieveConfig] = None
) -> list[RecurrenceResidual]:
    """Compare q at index u+1 from its definition with both recurrence forms at u."""
    us = sorted(set(int(u) for u in u_range))
    if not us:
        return []
    if us[0] < 2:
        raise DomainError("the recurrence needs u >= 2 (log base theta(p_1) = log 2 < 1)")
    wanted = set(us)
    out = []
    prev: Optional[ThetaMertensState] = None
    prev_q = 0.0
    for state in walk_states(us[-1] + 1, config=config):
        q_now = q_from_state(state).q
        if prev is not None:
            p = state.p_n
            literal = recurrence_rhs_literal(prev, prev_q, p)
            simplified = recurrence_rhs_simplified(prev.theta_value, prev_q, p, math.log(p))
            out.append(
                RecurrenceResidual(
                    u=prev.n,
                    direct_q_next=q_now,
                    literal_rhs=literal,
                    simplified_rhs=simplified,
                    residual_literal=q_now - literal,
                    residual_paths=literal - simplified,
                )
            )
        if state.n in wanted:
            prev, prev_q = state.copy(), q_now
        else:
            prev = None
    return out


def summarize_recurrence(rows: Sequence[RecurrenceResidual]) -> RecurrenceSummary:
    def rel(res, scale):
        return abs(res) / max(1.0, abs(scale))

    return RecurrenceSummary(
        count=len(rows),
        max_abs_literal=max((abs(r.residual_literal) for r in rows), default=0.0),
        max_rel_literal=max((rel(r.residual_literal, r.direct_q_next) for r in rows), default=0.0),
        max_abs_paths=max((abs(r.residual_paths) for r in rows), default=0.0),
        max_rel_paths=max((rel(r.residual_paths, r.simplified_rhs) for r in rows), default=0.0),
    )


# --- theta(p_n) / p_n --------------------------------------------------------


@dataclass(frozen=True)
class PntRow:
    n: int
    p_n: int
    theta: float
    ratio: float


def pnt_ratio_sweep(n_grid: Iterable[int], config: Optional[SieveConfig] = None) -> list[PntRow]:
    grid = sorted(set(int(n) for n in n_grid))
    if not grid or grid[0] < 1:
        raise DomainError("n grid must be non-empty with n >= 1")
    wanted = set(grid)
    out = []
    for state in walk_states(grid[-1], config=config):
        if state.n in wanted:
            theta = state.theta_value
            out.append(PntRow(state.n, state.p_n, theta, theta / state.p_n))
    return out


def pnt_summary(rows: Sequence[PntRow]) -> dict:
    last = rows[-1]
    top = [r for r in rows if r.n * 10 >= last.n]
    return {
        "last_n": last.n,
        "last_ratio": last.ratio,
        "max_deviation_top_decade": max(abs(1.0 - r.ratio) for r in top),
    }


# --- mean prime gap versus f(x) - x -----------------------------------------


@dataclass(frozen=True)
class GapComparison:
    x: float
    mean_gap: float
    f_gap: float
    ratio: float
    pi_x: int
    largest_prime: int
    iterates: tuple[float, ...] = field(default=())


def synth_gap_compare(x_grid: Iterable[float], k_iterates: int = 3) -> list[GapComparison]:
    """Mean gap (p_pi(x) - 2)/(pi(x) - 1) of primes <= x against f(x) - x."""
    grid = sorted(float(x) for x in x_grid)
    if not grid:
        return []
    if grid[0] < 10:
        raise DomainError("gap comparison needs x >= 10")
    counts: list[tuple[int, int]] = []
    gi, count, last = 0, 0, 0
    for block in iter_blocks(SieveConfig(limit=int(math.floor(grid[-1])))):
        pr = block.primes
        if len(pr) == 0:
            continue
        while gi < len(grid) and grid[gi] < pr[-1]:
            k = int(np.searchsorted(pr, grid[gi], side="right"))
            counts.append((count + k, int(pr[k - 1]) if k else last))
            gi += 1
        count += len(pr)
        last = int(pr[-1])
    while gi < len(grid):
        counts.append((count, last))
        gi += 1

    out = []
    for x, (pi_x, p_last) in zip(grid, counts):
        mean_gap = (p_last - 2) / (pi_x - 1)
        f_gap = f_of(x).excess
        out.append(
            GapComparison(
                x=x,
                mean_gap=mean_gap,
                f_gap=f_gap,
                ratio=mean_gap / f_gap,
                pi_x=pi_x,
                largest_prime=p_last,
                iterates=tuple(iterate_f(x, k_iterates)),
            )
        )
    return out
