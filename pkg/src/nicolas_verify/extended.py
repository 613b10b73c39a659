"""mpmath versions of f and the lemma residuals, for the ``extended`` backend.

Expressions are evaluated exactly as written (no cancellation-avoiding
rearrangement); 50 digits leave ample headroom for x up to 1e15.
"""
from __future__ import annotations

from mpmath import mp, mpf

from .errors import DomainError

DPS = 50


def f_mp(x, dps: int = DPS):
    """Root y > 1 of log(y)(1 - 1/y) = log(x), by bisection then secant polish."""
    with mp.workdps(dps + 10):
        x = mpf(x)
        if x < 1:
            raise DomainError(f"f(x) is undefined for x < 1 (got {x})")
        if x == 1:
            return mpf(1)
        L = mp.log(x)
        g = lambda y: mp.log(y) * (1 - 1 / y) - L
        lo, hi = mpf(1), 2 * x + 2
        for _ in range(60):
            mid = (lo + hi) / 2
            if g(mid) < 0:
                lo = mid
            else:
                hi = mid
        y = mp.findroot(g, (lo, hi), solver="anderson")
        return +y


def b_mp(x, dps: int = DPS):
    with mp.workdps(dps):
        x = mpf(x)
        if x <= 1:
            raise DomainError(f"b(x) needs x > 1 (got {x})")
        return mp.log(x) / mp.log(1 + mp.log(x) / x)


def residual_mp(lemma_id: str, x, dps: int = DPS):
    """Residual of one lemma expression at x, evaluated literally."""
    with mp.workdps(dps):
        x = mpf(x)
        L = mp.log(x)
        if lemma_id == "L1-b":
            return x ** (1 + 1 / b_mp(x, dps)) - x - L
        if lemma_id == "L1-f-plus":
            return x ** (1 + 1 / (f_mp(x, dps) - 1)) - x - L
        if lemma_id == "L1-f-minus":
            return x ** (1 - 1 / (f_mp(x, dps) - 1)) - x - L
        if lemma_id == "L2":
            return x * (x * mp.log(1 + L / x) - L) + L**2 / 2
        if lemma_id == "L3":
            return L / 2 - b_mp(x, dps) + x
        if lemma_id == "L4":
            return f_mp(x, dps) - x - L
    raise ValueError(f"unknown lemma id {lemma_id!r}")
