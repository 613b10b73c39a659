import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nicolas_verify.accumulate import CompensatedSum, ThetaMertensState, extend
from nicolas_verify.checkpoint import (
    Checkpoint,
    dumps,
    load_checkpoint,
    loads,
    save_checkpoint,
)
from nicolas_verify.errors import CorruptCheckpoint, VersionMismatch
from nicolas_verify.sieve import PrimeBlock, SieveConfig, SieveCursor, next_block

FIRST_TEN = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.fixture
def state10():
    return extend(ThetaMertensState(), PrimeBlock(1, np.array(FIRST_TEN)))


def test_round_trip_at_n10(tmp_path, state10):
    path = tmp_path / "ck.txt"
    save_checkpoint(state10, path)
    back = load_checkpoint(path).to_state()
    assert back.same_bits(state10)
    assert back.theta_value == state10.theta_value


def test_resume_through_p11(tmp_path, state10):
    save_checkpoint(state10, tmp_path / "ck.txt")
    ck = load_checkpoint(tmp_path / "ck.txt")
    cursor = SieveCursor.after(ck.n, ck.p_n)
    blk = next_block(SieveConfig(segment_size=1024), cursor)
    s = extend(ck.to_state(), blk.head(1))
    assert s.p_n == 31
    assert s.theta_value == pytest.approx(26.0243817346, abs=1e-10)
    assert s.theta_value == pytest.approx(state10.theta_value + math.log(31), rel=1e-15)


def test_unknown_version(state10):
    text = dumps(Checkpoint.from_state(state10)).replace("format_version 1", "format_version 7")
    with pytest.raises(VersionMismatch):
        loads(text)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda t: t.replace("n 10\n", ""),
        lambda t: t.replace("p_n 29", "p_n twenty-nine"),
        lambda t: t + "bogus 1\n",
        lambda t: t.replace("0x", "0y", 1),
        lambda t: "\n".join(l if not l.startswith("theta_sum") else "theta_sum 1.0 0x1.0p+0 extra" for l in t.splitlines()),
    ],
)
def test_corrupt_files(state10, mutate):
    with pytest.raises(CorruptCheckpoint):
        loads(mutate(dumps(Checkpoint.from_state(state10))))


def test_decimal_hex_disagreement_is_corrupt(state10):
    text = dumps(Checkpoint.from_state(state10))
    lines = text.splitlines()
    key, dec, hx = lines[3].split()
    lines[3] = f"{key} {float(dec) * 2:.17g} {hx}"
    with pytest.raises(CorruptCheckpoint):
        loads("\n".join(lines))


def test_binary_garbage_is_corrupt(tmp_path):
    p = tmp_path / "bad"
    p.write_bytes(b"\xff\xfe\x00\x81")
    with pytest.raises(CorruptCheckpoint):
        load_checkpoint(p)


def test_extras_round_trip(state10):
    ck = Checkpoint.from_state(state10, {"min_margin": 0.069055099223, "min_n": 10.0})
    assert loads(dumps(ck)).extras == ck.extras


def test_field_order(state10):
    keys = [l.split()[0] for l in dumps(Checkpoint.from_state(state10)).splitlines()]
    assert keys == ["format_version", "n", "p_n", "theta_sum", "theta_compensation", "mertens_sum", "mertens_compensation"]


floats = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=200)
@given(n=st.integers(1, 10**12), p=st.integers(2, 10**14), a=floats, b=floats, c=floats, d=floats)
def test_round_trip_bit_exact(n, p, a, b, c, d):
    s = ThetaMertensState(n, p, CompensatedSum(a, b), CompensatedSum(c, d))
    back = loads(dumps(Checkpoint.from_state(s))).to_state()
    assert back.same_bits(s)
