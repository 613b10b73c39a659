"""Command-line entry point: ``nicolas-verify <command> [options]``.

Data goes to a report file (CSV or JSON); a one-line summary goes to stdout.
Exit status: 0 success, 1 a sweep found a non-positive margin, 2 domain or
checkpoint errors, 3 I/O errors.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from . import verifier
from .checkpoint import load_checkpoint, save_checkpoint
from .errors import CheckpointError, DomainError, NicolasVerifyError
from .functions import f_of, q_from_state
from .report import COLUMNS, CsvReport, PlotError, emit_plot_script, write_json
from .sieve import DEFAULT_SEGMENT_SIZE, SieveConfig

OUTPUT_DIR_ENV = "NICOLAS_VERIFY_OUTPUT_DIR"

log = logging.getLogger("nicolas_verify")


@dataclass
class RunConfig:
    command: str
    n_max: int = 1
    stride: int = 1
    x_values: list[float] = field(default_factory=list)
    lemmas: list[str] = field(default_factory=lambda: list(verifier.LEMMA_IDS))
    lo: float = math.e
    hi: float = 100.0
    tol: float = 1e-6
    certify_upto: float = 1e6
    u_min: int = 2
    u_max: int = 10_000
    n_grid: list[int] = field(default_factory=list)
    iterates: int = 3
    checkpoint_path: Optional[Path] = None
    resume_path: Optional[Path] = None
    output_path: Optional[Path] = None
    output_format: str = "csv"
    emit_plot: bool = False
    precision_backend: str = "standard"
    segment_size: int = DEFAULT_SEGMENT_SIZE
    workers: int = 1

    def __post_init__(self):
        if self.command not in COLUMNS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.n_max < 1 or self.stride < 1:
            raise DomainError("n_max and stride must be >= 1")
        if self.output_format not in ("csv", "json"):
            raise DomainError(f"unknown output format {self.output_format!r}")
        if self.precision_backend not in ("standard", "extended"):
            raise DomainError(f"unknown precision backend {self.precision_backend!r}")
        if self.segment_size < 1024 or self.workers < 1:
            raise DomainError("segment size must be >= 1024 and workers >= 1")

    def resolved_output(self) -> Path:
        if self.output_path is not None:
            return Path(self.output_path)
        base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
        return base / f"{self.command}.{self.output_format}"

    def sieve_config(self) -> SieveConfig:
        return SieveConfig(segment_size=self.segment_size, workers=self.workers)


class Sink:
    """Collects rows for JSON, or streams them straight into a CSV file."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.path = cfg.resolved_output()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.rows: list[Sequence[Any]] = []
        self._csv = CsvReport(self.path, cfg.command) if cfg.output_format == "csv" else None
        self.count = 0

    def write(self, row: Sequence[Any]) -> None:
        self.count += 1
        if self._csv is not None:
            self._csv.write(row)
        else:
            self.rows.append(row)

    def finish(self, summary: dict, extra: Optional[dict] = None) -> None:
        if self._csv is not None:
            self._csv.close()
        else:
            write_json(self.path, self.cfg.command, self.rows, summary, extra)
        if self.cfg.emit_plot:
            if self.cfg.output_format != "csv":
                raise PlotError("plot scripts need a CSV report")
            emit_plot_script(self.path, self.cfg.command)


def _g(x: float) -> str:
    return format(x, ".10g")


def _run_sweep(cfg: RunConfig, sink: Sink) -> tuple[str, dict, int]:
    start, min_margin, min_n = None, math.inf, 0
    if cfg.resume_path is not None:
        ck = load_checkpoint(cfg.resume_path)
        start = ck.to_state()
        min_margin = ck.extras.get("min_margin", math.inf)
        min_n = int(ck.extras.get("min_n", 0))
        if start.n >= cfg.n_max:
            raise CheckpointError(f"checkpoint is already at n={start.n} >= n_max={cfg.n_max}")
    first = (start.n if start else 0) + 1
    sweep = verifier.NicolasSweep(
        cfg.n_max, cfg.stride, start=start, min_margin=min_margin, min_n=min_n, config=cfg.sieve_config()
    )
    for r in sweep:
        sink.write((r.n, r.p_n, r.theta, r.lhs, r.margin, r.q, r.ratio_form_margin))
    if cfg.checkpoint_path is not None:
        save_checkpoint(sweep.state, cfg.checkpoint_path, sweep.extras())
    ok = not sweep.failures
    summary = {
        "n_first": first,
        "n_last": sweep.state.n,
        "min_margin": sweep.min_margin,
        "min_margin_n": sweep.min_n,
        "nonpositive_count": len(sweep.failures),
        "first_nonpositive_n": sweep.failures[0] if sweep.failures else None,
        "sign_mismatch_count": len(sweep.sign_mismatches),
    }
    verdict = f"margin>0 and q>0 at all {sweep.checked} indices" if ok else (
        f"{len(sweep.failures)} non-positive indices, first at n={sweep.failures[0]}"
    )
    line = f"sweep n={first}..{sweep.state.n}: min margin at n={sweep.min_n}: {_g(sweep.min_margin)}; {verdict}"
    return line, summary, 0 if ok else 1


def _run_qseq(cfg: RunConfig, sink: Sink):
    last = None
    for state in verifier.walk_states(cfg.n_max, config=cfg.sieve_config()):
        if state.n % cfg.stride == 0 or state.n == cfg.n_max:
            qv = q_from_state(state)
            sink.write((state.n, state.p_n, qv.theta, qv.q, qv.exponent))
            last = qv
    summary = {"n": last.n, "q": last.q, "theta": last.theta}
    return f"q at n={last.n}: {_g(last.q)} (theta={_g(last.theta)})", summary, 0


def _fsolve_grid(cfg: RunConfig) -> list[float]:
    return cfg.x_values or verifier.decade_grid(0, 9, 4)[1:]


def _run_fsolve(cfg: RunConfig, sink: Sink):
    worst = 0.0
    for x in _fsolve_grid(cfg):
        if cfg.precision_backend == "extended":
            from mpmath import mp

            from .extended import f_mp

            y = f_mp(x)
            with mp.workdps(50):
                res = float(mp.log(y) * (1 - 1 / y) - mp.log(x))
            row = (float(x), float(y), res, 0)
        else:
            r = f_of(x)
            row = (r.x, r.f, r.residual, r.iterations)
        worst = max(worst, abs(row[2]) / max(1.0, abs(math.log(row[0]))))
        sink.write(row)
    return f"f solved at {sink.count} points; max scaled residual {_g(worst)}", {"max_scaled_residual": worst}, 0


def _run_diagnostics(cfg: RunConfig, sink: Sink):
    grid = cfg.x_values or verifier.decade_grid(2, 8)
    samples = verifier.lemma_residuals(grid, cfg.lemmas, backend=cfg.precision_backend)
    for s in samples:
        sink.write((s.lemma_id, s.x, s.residual))
    at_top = {s.lemma_id: s.residual for s in samples if s.x == grid[-1]}
    parts = ", ".join(f"{k}={_g(v)}" for k, v in at_top.items())
    return f"residuals at x={_g(grid[-1])}: {parts}", {"x_max": grid[-1], "residual_at_x_max": at_top}, 0


def _run_crossover(cfg: RunConfig, sink: Sink):
    x_star = verifier.gym_crossover_search(cfg.lo, cfg.hi, cfg.tol)
    res = f_of(x_star).excess - math.log(x_star)
    cert = verifier.sampled_sign_certificate(x_star, cfg.certify_upto)
    sink.write((x_star, res, cert.upper, cert.samples, cert.all_negative))
    line = (
        f"crossover x* = {_g(x_star)} (residual {_g(res)}); f(x) - x - log x < 0 at "
        f"{'all' if cert.all_negative else 'NOT all'} {cert.samples} samples up to {_g(cert.upper)}"
    )
    summary = {"x_star": x_star, "residual": res, "all_negative": cert.all_negative, "max_sampled": cert.max_residual}
    return line, summary, 0


def _run_recurrence(cfg: RunConfig, sink: Sink):
    rows = verifier.recurrence_check_sweep(range(cfg.u_min, cfg.u_max + 1), config=cfg.sieve_config())
    for r in rows:
        sink.write((r.u, r.direct_q_next, r.literal_rhs, r.simplified_rhs, r.residual_literal, r.residual_paths))
    s = verifier.summarize_recurrence(rows)
    line = (
        f"recurrence u={cfg.u_min}..{cfg.u_max}: max rel |direct-literal| {_g(s.max_rel_literal)}, "
        f"max rel |literal-simplified| {_g(s.max_rel_paths)}"
    )
    return line, vars(s), 0


def _run_pnt(cfg: RunConfig, sink: Sink):
    rows = verifier.pnt_ratio_sweep(cfg.n_grid or [10**k for k in range(3, 7)], config=cfg.sieve_config())
    for r in rows:
        sink.write((r.n, r.p_n, r.theta, r.ratio))
    s = verifier.pnt_summary(rows)
    line = f"theta(p_n)/p_n at n={s['last_n']}: {_g(s['last_ratio'])}; max |1-ratio| over top decade {_g(s['max_deviation_top_decade'])}"
    return line, s, 0


def _run_gaps(cfg: RunConfig, sink: Sink):
    rows = verifier.synth_gap_compare(cfg.x_values or [1e3, 1e6], cfg.iterates)
    for g in rows:
        sink.write((g.x, g.mean_gap, g.f_gap, g.ratio))
    last = rows[-1]
    summary = {"x": last.x, "ratio": last.ratio}
    extra = {"iterates": {format(g.x, ".17g"): list(g.iterates) for g in rows}}
    return f"mean gap/(f(x)-x) at x={_g(last.x)}: {_g(last.ratio)}", summary, 0, extra


_RUNNERS = {
    "sweep": _run_sweep,
    "qseq": _run_qseq,
    "fsolve": _run_fsolve,
    "diagnostics": _run_diagnostics,
    "crossover": _run_crossover,
    "recurrence": _run_recurrence,
    "pnt": _run_pnt,
    "gaps": _run_gaps,
}


def _discard(sink: Optional[Sink]) -> None:
    if sink is None:
        return
    if sink._csv is not None:
        sink._csv.close()
    sink.path.unlink(missing_ok=True)


def run(cfg: RunConfig, out=None) -> int:
    """Execute one command, write its report, print the summary line."""
    out = out or sys.stdout
    sink = None
    try:
        sink = Sink(cfg)
        result = _RUNNERS[cfg.command](cfg, sink)
        line, summary, status = result[:3]
        extra = result[3] if len(result) > 3 else None
        sink.finish(summary, extra)
    except (NicolasVerifyError, PlotError, ValueError) as exc:
        _discard(sink)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        _discard(sink)
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    print(line, file=out)
    return status


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text: str) -> list[int]:
    return [int(float(v)) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", type=Path, help=f"report path (default: ${OUTPUT_DIR_ENV} or . / <command>.<format>)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--plot", action="store_true", help="also write a gnuplot script next to the CSV report")
    common.add_argument("--precision", choices=("standard", "extended"), default="standard",
                        help="extended uses mpmath for fsolve and diagnostics")
    common.add_argument("--segment-size", type=int, default=DEFAULT_SEGMENT_SIZE)
    common.add_argument("--workers", type=int, default=1, help="threads for sieving segments")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="nicolas-verify", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="Nicolas margin over n = 1..n_max")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--resume", type=Path, help="checkpoint to continue from")
    p.add_argument("--checkpoint", type=Path, help="write the final state here")

    p = sub.add_parser("qseq", parents=[common], help="q at n = stride, 2*stride, ..., n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--stride", type=int, default=1)

    p = sub.add_parser("fsolve", parents=[common], help="solve f(x) on a list of x")
    p.add_argument("--x", type=_float_list, help="comma-separated abscissae (default: 4 per decade on (1, 1e9])")

    p = sub.add_parser("diagnostics", parents=[common], help="limit-lemma residuals on a decade grid")
    p.add_argument("--lemmas", default=",".join(verifier.LEMMA_IDS))
    p.add_argument("--decades", type=int, nargs=2, default=(2, 8), metavar=("LO", "HI"))
    p.add_argument("--per-decade", type=int, default=1)
    p.add_argument("--x", type=_float_list, help="explicit grid (overrides --decades)")

    p = sub.add_parser("crossover", parents=[common], help="where f(x) - x - log x changes sign")
    p.add_argument("--lo", type=float, default=math.e)
    p.add_argument("--hi", type=float, default=100.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--certify-upto", type=float, default=1e6)

    p = sub.add_parser("recurrence", parents=[common], help="q recurrence vs direct q")
    p.add_argument("--u-min", type=int, default=2)
    p.add_argument("--u-max", type=int, default=10_000)

    p = sub.add_parser("pnt", parents=[common], help="theta(p_n)/p_n on an n grid")
    p.add_argument("--n-grid", type=_int_list, default=None)

    p = sub.add_parser("gaps", parents=[common], help="mean prime gap vs f(x) - x")
    p.add_argument("--x-grid", type=_float_list, default=None)
    p.add_argument("--iterates", type=int, default=3)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = dict(
        command=args.command,
        output_path=args.output,
        output_format=args.format,
        emit_plot=args.plot,
        precision_backend=args.precision,
        segment_size=args.segment_size,
        workers=args.workers,
    )
    c = args.command
    if c == "sweep":
        cfg.update(n_max=args.n_max, stride=args.stride, resume_path=args.resume, checkpoint_path=args.checkpoint)
    elif c == "qseq":
        cfg.update(n_max=args.n, stride=args.stride)
    elif c == "fsolve":
        cfg.update(x_values=args.x or [])
    elif c == "diagnostics":
        cfg.update(
            lemmas=[s.strip() for s in args.lemmas.split(",") if s.strip()],
            x_values=args.x or verifier.decade_grid(args.decades[0], args.decades[1], args.per_decade),
        )
    elif c == "crossover":
        cfg.update(lo=args.lo, hi=args.hi, tol=args.tol, certify_upto=args.certify_upto)
    elif c == "recurrence":
        cfg.update(u_min=args.u_min, u_max=args.u_max)
    elif c == "pnt":
        cfg.update(n_grid=args.n_grid or [])
    elif c == "gaps":
        cfg.update(x_values=args.x_grid or [], iterates=args.iterates)
    return RunConfig(**cfg)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
