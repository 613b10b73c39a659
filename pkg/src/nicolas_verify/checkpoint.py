"""Flat key/value checkpoint files for resumable sweeps.

File layout, one ``key value`` pair per line, in this order::

    format_version 1
    n 10
    p_n 29
    theta_sum <decimal> <hex>
    theta_compensation <decimal> <hex>
    mertens_sum <decimal> <hex>
    mertens_compensation <decimal> <hex>
    extra.<name> <decimal> <hex>      (zero or more)

Floats carry a 17-significant-digit decimal for reading and the exact
``float.hex`` form, which is what ``load`` uses. The two must agree or the
file is reported corrupt.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .accumulate import CompensatedSum, ThetaMertensState
from .errors import CorruptCheckpoint, VersionMismatch

FORMAT_VERSION = 1
_FLOAT_KEYS = ("theta_sum", "theta_compensation", "mertens_sum", "mertens_compensation")


@dataclass
class Checkpoint:
    n: int
    p_n: int
    theta_sum: float
    theta_compensation: float
    mertens_sum: float
    mertens_compensation: float
    format_version: int = FORMAT_VERSION
    # caller-owned floats carried alongside the state (e.g. a sweep's running minimum)
    extras: dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_state(cls, state: ThetaMertensState, extras: dict[str, float] | None = None) -> "Checkpoint":
        return cls(
            n=state.n,
            p_n=state.p_n,
            theta_sum=state.theta.sum,
            theta_compensation=state.theta.compensation,
            mertens_sum=state.mertens_log.sum,
            mertens_compensation=state.mertens_log.compensation,
            extras=dict(extras or {}),
        )

    def to_state(self) -> ThetaMertensState:
        if self.format_version != FORMAT_VERSION:
            raise VersionMismatch(f"unsupported checkpoint format_version {self.format_version}")
        return ThetaMertensState(
            n=self.n,
            p_n=self.p_n,
            theta=CompensatedSum(self.theta_sum, self.theta_compensation),
            mertens_log=CompensatedSum(self.mertens_sum, self.mertens_compensation),
        )


def _fmt_float(x: float) -> str:
    return f"{x:.17g} {float(x).hex()}"


def dumps(ck: Checkpoint) -> str:
    lines = [
        f"format_version {ck.format_version}",
        f"n {ck.n}",
        f"p_n {ck.p_n}",
    ]
    lines += [f"{key} {_fmt_float(getattr(ck, key))}" for key in _FLOAT_KEYS]
    lines += [f"extra.{name} {_fmt_float(value)}" for name, value in sorted(ck.extras.items())]
    return "\n".join(lines) + "\n"


def _parse_float(key: str, fields: list[str]) -> float:
    if len(fields) != 2:
        raise CorruptCheckpoint(f"{key}: expected '<decimal> <hex>'")
    try:
        dec, exact = float(fields[0]), float.fromhex(fields[1])
    except ValueError as exc:
        raise CorruptCheckpoint(f"{key}: {exc}") from None
    if dec != exact and not (dec != dec and exact != exact):
        raise CorruptCheckpoint(f"{key}: decimal {fields[0]} disagrees with hex {fields[1]}")
    return exact


def loads(text: str) -> Checkpoint:
    raw: dict[str, list[str]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        key, *rest = line.split()
        if key in raw:
            raise CorruptCheckpoint(f"line {lineno}: duplicate key {key!r}")
        raw[key] = rest
    if "format_version" not in raw:
        raise CorruptCheckpoint("missing format_version")
    try:
        version = int(raw["format_version"][0])
    except (ValueError, IndexError):
        raise CorruptCheckpoint("format_version is not an integer") from None
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"unsupported checkpoint format_version {version}")

    missing = [k for k in ("n", "p_n", *_FLOAT_KEYS) if k not in raw]
    if missing:
        raise CorruptCheckpoint(f"missing keys: {', '.join(missing)}")
    try:
        n, p_n = int(raw["n"][0]), int(raw["p_n"][0])
    except (ValueError, IndexError):
        raise CorruptCheckpoint("n and p_n must be integers") from None
    if n < 0 or (n == 0) != (p_n == 0):
        raise CorruptCheckpoint(f"inconsistent n={n}, p_n={p_n}")

    floats = {k: _parse_float(k, raw[k]) for k in _FLOAT_KEYS}
    extras = {}
    for key, fields in raw.items():
        if key.startswith("extra."):
            extras[key[len("extra."):]] = _parse_float(key, fields)
        elif key not in ("format_version", "n", "p_n", *_FLOAT_KEYS):
            raise CorruptCheckpoint(f"unknown key {key!r}")
    return Checkpoint(n=n, p_n=p_n, format_version=version, extras=extras, **floats)


def save_checkpoint(state: ThetaMertensState, path: str | os.PathLike, extras: dict[str, float] | None = None) -> Checkpoint:
    ck = Checkpoint.from_state(state, extras)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(dumps(ck))
    os.replace(tmp, path)
    return ck


def load_checkpoint(path: str | os.PathLike) -> Checkpoint:
    try:
        text = Path(path).read_text()
    except UnicodeDecodeError:
        raise CorruptCheckpoint(f"{path}: not a text checkpoint") from None
    return loads(text)
