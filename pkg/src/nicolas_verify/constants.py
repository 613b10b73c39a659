"""Euler-Mascheroni constant and e^-gamma as correctly rounded doubles.

Both were rounded from a 50-digit evaluation (mpmath ``euler``); the test
suite re-derives gamma independently from harmonic numbers. The import-time
check guards against an accidental edit of either literal.
"""
import math

GAMMA = 0.5772156649015329
EXP_NEG_GAMMA = 0.5614594835668851


def self_check() -> None:
    if abs(math.exp(-GAMMA) - EXP_NEG_GAMMA) > 2 * math.ulp(EXP_NEG_GAMMA):
        raise RuntimeError("stored e^-gamma is inconsistent with stored gamma")


self_check()
