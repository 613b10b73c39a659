import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from nicolas_verify.accumulate import ThetaMertensState
from nicolas_verify.constants import EXP_NEG_GAMMA
from nicolas_verify.errors import DomainError
from nicolas_verify.functions import (
    b_of,
    f_of,
    h_of,
    iterate_f,
    q_from_state,
    recurrence_rhs_literal,
    recurrence_rhs_simplified,
)
from nicolas_verify.sieve import first_primes


def bisect_f(x, dps=40):
    """Independent oracle: plain bisection on log(y)(1 - 1/y) = log x."""
    with mp.workdps(dps):
        x = mpf(x)
        lo, hi = mpf(1), 2 * x + 2
        for _ in range(dps * 4):
            mid = (lo + hi) / 2
            if mp.log(mid) * (1 - 1 / mid) < mp.log(x):
                lo = mid
            else:
                hi = mid
        return lo


def state_at(n):
    s = ThetaMertensState()
    for p in first_primes(n).tolist():
        s.add_prime(p)
    return s


# values below come from bisect_f / 40-digit evaluation
@pytest.mark.parametrize(
    "x, expected",
    [(math.e, 3.85733482594938), (100.0, 104.547766102655), (2.0, 2.88747485419596), (10.0, 12.2673790495803)],
)
def test_f_reference_values(x, expected):
    assert f_of(x).f == pytest.approx(expected, rel=1e-14)


def test_f_at_one_is_exact():
    r = f_of(1.0)
    assert r.f == 1.0 and r.residual == 0.0


@pytest.mark.parametrize("x", [0.999, 0.5, 0.0, -3.0, float("nan")])
def test_f_domain(x):
    with pytest.raises(DomainError):
        f_of(x)


@pytest.mark.parametrize("x", [100.0, 1e4, 1e6])
def test_f_asymptotic_expansion(x):
    L = math.log(x)
    approx = x + L - L * L / (2 * x) + L / x
    assert abs(f_of(x).f - approx) < L**3 / x**2


@settings(max_examples=80, deadline=None)
@given(st.floats(min_value=1.0001, max_value=1e9))
def test_f_matches_bisection_oracle(x):
    got = f_of(x)
    assert got.f == pytest.approx(float(bisect_f(x)), rel=4e-16 * 8)
    assert abs(got.residual) < 1e-12 * max(1.0, abs(math.log(x)))
    assert got.f >= 1.0


def test_f_monotone_on_grid():
    xs = np.geomspace(1.001, 1e9, 400)
    fs = [f_of(x).f for x in xs]
    assert all(b > a for a, b in zip(fs, fs[1:]))


@pytest.mark.parametrize("x, expected", [(math.e, 3.19221928452974), (100.0, 102.285307541518)])
def test_b_reference_values(x, expected):
    assert b_of(x) == pytest.approx(expected, rel=1e-13)


def test_b_defining_identity_at_100():
    b = b_of(100.0)
    assert math.exp((1 + 1 / b) * math.log(100.0)) == pytest.approx(100 + math.log(100), rel=1e-14)


def test_b_asymptotic_at_million():
    x = 1e6
    assert -1e-3 < b_of(x) - x - math.log(x) / 2 < 1e-3


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=2.0, max_value=1e9))
def test_b_identity_property(x):
    L = math.log(x)
    lhs_minus_x = x * math.expm1(L / b_of(x))
    assert abs(lhs_minus_x - L) < 1e-9 * x


@pytest.mark.parametrize("x", [1.0, 0.5])
def test_b_domain(x):
    with pytest.raises(DomainError):
        b_of(x)


@pytest.mark.parametrize("x, expected", [(math.e, 3.12380870931913), (100.0, 94.4212451754563)])
def test_h_reference_values(x, expected):
    assert h_of(x) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1.01, max_value=1e8))
def test_h_identity(x):
    assert abs(x + math.log(h_of(x)) - f_of(x).f) < 1e-10 * max(1.0, x / 1e4)


def test_h_below_x_once_f_below_x_plus_log():
    assert h_of(100.0) < 100.0


@pytest.mark.parametrize(
    "n, expected, published",
    [(1, 2.38066630098, None), (10, 12.3879249009, 12.388), (100, 53.2748084474, 53.275)],
)
def test_q_values(n, expected, published):
    qv = q_from_state(state_at(n))
    assert qv.q == pytest.approx(expected, abs=1e-9)
    if published is not None:
        assert abs(qv.q - published) < 5e-4


def test_q_at_one_closed_form():
    assert q_from_state(state_at(1)).q == pytest.approx(math.exp(EXP_NEG_GAMMA / 0.5) - math.log(2), rel=1e-15)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 100, 1000, 5000])
def test_q_recovers_exp_neg_gamma(n):
    s = state_at(n)
    qv = q_from_state(s)
    assert math.log(qv.theta + qv.q) * s.mertens_product == pytest.approx(EXP_NEG_GAMMA, rel=1e-12)


def test_q_needs_a_prime():
    with pytest.raises(DomainError):
        q_from_state(ThetaMertensState())


def test_recurrence_u10():
    s = state_at(10)
    q10 = q_from_state(s).q
    lit = recurrence_rhs_literal(s, q10, 31)
    simp = recurrence_rhs_simplified(s.theta_value, q10, 31, math.log(31))
    assert lit == pytest.approx(13.3540942497, abs=1e-9)
    assert simp == pytest.approx(13.3540942497, abs=1e-9)


def test_recurrence_u2_matches_direct_q3():
    s = state_at(2)
    lit = recurrence_rhs_literal(s, q_from_state(s).q, 5)
    assert abs(lit - q_from_state(state_at(3)).q) < 1e-9


def test_recurrence_rearranged_exponent():
    s = state_at(10)
    q = q_from_state(s).q
    th = s.theta_value
    F = f_of(th).f
    lt = math.log(th)
    A = ((1 - 1 / F) * lt) / (1 - 1 / 31) * (math.log(th + q) / lt) / lt
    alt = math.exp(A * math.log(F)) - math.log(31) - th
    assert abs(alt - recurrence_rhs_literal(s, q, 31)) <= 4 * math.ulp(alt) + 1e-13


def test_recurrence_literal_domain_at_u1():
    s = state_at(1)
    with pytest.raises(DomainError):
        recurrence_rhs_literal(s, q_from_state(s).q, 3)


def test_simplified_degenerates_for_huge_p():
    th, q, p = 22.59, 12.39, 10**15
    got = recurrence_rhs_simplified(th, q, p, math.log(p))
    assert got == pytest.approx(q - math.log(p), rel=1e-9)


def test_simplified_domain():
    with pytest.raises(DomainError):
        recurrence_rhs_simplified(0.5, 0.2, 3, math.log(3))


def test_two_paths_agree_u_2_to_100():
    primes = first_primes(101).tolist()
    s = ThetaMertensState()
    for u, p in enumerate(primes[:-1], 1):
        s.add_prime(p)
        if u < 2:
            continue
        q = q_from_state(s).q
        lit = recurrence_rhs_literal(s, q, primes[u])
        simp = recurrence_rhs_simplified(s.theta_value, q, primes[u], math.log(primes[u]))
        assert abs(lit - simp) < 1e-9 * max(1.0, abs(simp))


def test_iterate_f():
    assert iterate_f(2.0, 1) == [2.0, pytest.approx(2.88747485419596, rel=1e-14)]
    assert iterate_f(2.0, 2)[2] == pytest.approx(4.07598304362974, rel=1e-14)
    assert iterate_f(1.0, 5) == [1.0] * 6
    assert iterate_f(7.0, 0) == [7.0]
    with pytest.raises(DomainError):
        iterate_f(0.5, 1)
