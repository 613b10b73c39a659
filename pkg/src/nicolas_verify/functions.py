"""Scalar functions over primorial data: f, b, h, q and the q-recurrence.

All powers ``a**t`` are evaluated as ``exp(t*log(a))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .accumulate import ThetaMertensState
from .constants import EXP_NEG_GAMMA
from .errors import ConvergenceError, DomainError

MAX_ITER = 200


@dataclass(frozen=True)
class FSolveResult:
    x: float
    f: float
    residual: float
    iterations: int
    # f - x, solved for directly so it stays accurate when x is large
    excess: float


@dataclass(frozen=True)
class QValue:
    n: int
    theta: float
    q: float
    exponent: float


def f_residual(x: float, y: float) -> float:
    """log(y)(1 - 1/y) - log(x)."""
    return math.log(y) * (1.0 - 1.0 / y) - math.log(x)


def f_of(x: float) -> FSolveResult:
    """Solve log(y)(1 - 1/y) = log(x) for the unique y > 1.

    y -> log(y)(1 - 1/y) increases strictly on (1, inf), so the largest root
    is the only one. Internally the unknown is d = y - x, which satisfies
    ``(x + d - 1) * log1p(d/x) = log(x)``; this is y times the original
    equation, so the sign pattern (and hence the bracket) is the same.

    Safeguarded Newton: a step that leaves the current bracket is replaced by
    bisection.
    """
    x = float(x)
    if not x >= 1.0:
        raise DomainError(f"f(x) is undefined for x < 1 (got {x})")
    if x == 1.0:
        return FSolveResult(x, 1.0, 0.0, 0, 0.0)
    if math.isinf(x):
        raise DomainError("f(x) needs a finite x")
    L = math.log(x)

    def phi(d):
        return (x + d - 1.0) * math.log1p(d / x) - L

    def dphi(d):
        y = x + d
        return math.log1p(d / x) + (y - 1.0) / y

    if x >= 7.0:
        lo, hi = 0.0, L + 1.0
        d = L - L * L / (2 * x) + L / x
    else:
        # y in [1, 2x + 2]
        lo, hi = 1.0 - x, x + 2.0
        d = 0.5 * (lo + hi)
    if not (phi(lo) < 0.0 < phi(hi)):
        raise ConvergenceError(f"initial bracket for f({x}) does not straddle the root")
    if not lo < d < hi:
        d = 0.5 * (lo + hi)

    for it in range(1, MAX_ITER + 1):
        v = phi(d)
        if v == 0.0:
            break
        if v < 0.0:
            lo = d
        else:
            hi = d
        slope = dphi(d)
        nd = d - v / slope if slope > 0.0 else 0.5 * (lo + hi)
        if not lo < nd < hi:
            nd = 0.5 * (lo + hi)
        if abs(nd - d) <= 2 * math.ulp(d) or hi - lo <= 2 * math.ulp(max(abs(lo), abs(hi))):
            d = nd
            break
        d = nd
    else:
        raise ConvergenceError(f"f({x}) did not converge in {MAX_ITER} iterations")
    y = x + d
    return FSolveResult(x, y, f_residual(x, y), it, d)


def b_of(x: float) -> float:
    """The b with x**(1 + 1/b) = x + log(x), i.e. log(x)/log(1 + log(x)/x)."""
    if not x > 1.0:
        raise DomainError(f"b(x) needs x > 1 (got {x})")
    L = math.log(x)
    return L / math.log1p(L / x)


def h_of(x: float) -> float:
    if not x > 1.0:
        raise DomainError(f"h(x) needs x > 1 (got {x})")
    return math.exp(f_of(x).excess)


def q_from_state(state: ThetaMertensState) -> QValue:
    """Offset q with log(theta + q) * prod(1 - 1/p_k) = e^-gamma over the first n primes."""
    if state.n < 1:
        raise DomainError("q needs at least one prime")
    theta = state.theta_value
    exponent = EXP_NEG_GAMMA * math.exp(-state.mertens_value)
    return QValue(state.n, theta, math.exp(exponent) - theta, exponent)


def recurrence_rhs_literal(state: ThetaMertensState, q_u: float, p_next: int) -> float:
    """F**A - log(p_next) - theta_u with F = f(theta_u) and
    A = (1 - 1/F)/(1 - 1/p_next) * log(theta_u + q_u)/log(theta_u)."""
    theta_u = state.theta_value
    if not theta_u > 1.0:
        raise DomainError(f"logarithm base theta_u = {theta_u} must exceed 1")
    if not theta_u + q_u > 0.0:
        raise DomainError("theta_u + q_u must be positive")
    F = f_of(theta_u).f
    A = (1.0 - 1.0 / F) / (1.0 - 1.0 / p_next) * (math.log(theta_u + q_u) / math.log(theta_u))
    return math.exp(A * math.log(F)) - math.log(p_next) - theta_u


def recurrence_rhs_simplified(theta_u: float, q_u: float, p_next: int, log_p_next: float) -> float:
    """(theta_u + q_u)**(1/(1 - 1/p_next)) - theta_u - log_p_next.

    Same value as the literal form: (1 - 1/F) log F = log theta_u cancels F.
    """
    base = theta_u + q_u
    if not base > 1.0:
        raise DomainError(f"theta_u + q_u = {base} must exceed 1")
    return math.exp(math.log(base) * p_next / (p_next - 1.0)) - theta_u - log_p_next


def iterate_f(x0: float, k: int) -> list[float]:
    """[x0, f(x0), f(f(x0)), ...] with k applications of f."""
    if k < 0:
        raise DomainError("k must be >= 0")
    if not x0 >= 1.0:
        raise DomainError(f"iteration start must be >= 1 (got {x0})")
    out = [float(x0)]
    for _ in range(k):
        out.append(f_of(out[-1]).f)
    return out
