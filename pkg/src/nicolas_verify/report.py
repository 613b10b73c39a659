"""CSV/JSON report writers and gnuplot script generation.

Floats are written with 17 significant digits so every value round-trips.
Missing values are an empty CSV field or JSON ``null``.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

COLUMNS: dict[str, tuple[str, ...]] = {
    "sweep": ("n", "p_n", "theta", "lhs", "margin", "q", "ratio_form_margin"),
    "qseq": ("n", "p_n", "theta", "q", "exponent"),
    "fsolve": ("x", "f", "residual", "iterations"),
    "diagnostics": ("lemma_id", "x", "residual"),
    "crossover": ("x_star", "residual", "certified_upto", "samples", "all_negative"),
    "recurrence": ("u", "direct", "literal", "simplified", "res_literal", "res_paths"),
    "pnt": ("n", "p_n", "theta", "ratio"),
    "gaps": ("x", "mean_gap", "f_gap", "ratio"),
}


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


class CsvReport:
    """Row-at-a-time CSV writer with a fixed header per command."""

    def __init__(self, path: Path, command: str):
        self.columns = COLUMNS[command]
        self.path = Path(path)
        self._fh = open(self.path, "w", newline="")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(self.columns)
        self.rows = 0

    def write(self, row: Sequence[Any]) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} fields, header has {len(self.columns)}")
        self._writer.writerow([format_cell(v) for v in row])
        self.rows += 1

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _json_value(value: Any) -> str:
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, Mapping):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    return json.dumps(value)


def write_json(
    path: Path,
    command: str,
    rows: Iterable[Sequence[Any]],
    summary: Mapping[str, Any],
    extra: Mapping[str, Any] | None = None,
) -> int:
    columns = COLUMNS[command]
    rows = [list(r) for r in rows]
    lines = [
        "{",
        f'  "command": {json.dumps(command)},',
        f'  "columns": {_json_value(list(columns))},',
        '  "rows": [',
        ",\n".join("    " + _json_value(r) for r in rows),
        "  ],",
    ]
    for key, value in (extra or {}).items():
        lines.append(f"  {json.dumps(key)}: {_json_value(value)},")
    lines.append(f'  "summary": {_json_value(dict(summary))}')
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n")
    return len(rows)


# --- gnuplot -----------------------------------------------------------------

_PLOTS = {
    "sweep": dict(logx=True, logy=True, xlabel="n", ylabel="margin", series=[('"n"', '"margin"', "margin")]),
    "qseq": dict(logx=False, logy=False, xlabel="n", ylabel="q", series=[('"n"', '"q"', "q")]),
    "fsolve": dict(logx=True, logy=False, xlabel="x", ylabel="f(x) - x", series=[('"x"', '(column("f") - column("x"))', "f(x) - x")]),
    "recurrence": dict(
        logx=False,
        logy=False,
        xlabel="u",
        ylabel="residual",
        series=[('"u"', '"res_literal"', "direct - literal"), ('"u"', '"res_paths"', "literal - simplified")],
    ),
    "pnt": dict(logx=True, logy=False, xlabel="n", ylabel="theta(p_n)/p_n", series=[('"n"', '"ratio"', "ratio")]),
    "gaps": dict(logx=True, logy=False, xlabel="x", ylabel="mean gap / (f(x) - x)", series=[('"x"', '"ratio"', "ratio")]),
}


class PlotError(ValueError):
    pass


def plot_script_text(report_name: str, command: str, lemma_ids: Sequence[str] = ()) -> str:
    head = [
        f"# gnuplot script for {report_name}",
        f'# usage: gnuplot {Path(report_name).stem}.gp',
        'set datafile separator ","',
        "set terminal pngcairo size 900,600",
        f'set output "{Path(report_name).stem}.png"',
        "set grid",
    ]
    if command == "diagnostics":
        ids = " ".join(lemma_ids)
        return "\n".join(
            head
            + [
                "set logscale xy",
                'set xlabel "x"',
                'set ylabel "|residual|"',
                f'ids = "{ids}"',
                f'plot for [id in ids] "{report_name}" using "x":(strcol("lemma_id") eq id ? abs(column("residual")) : NaN) '
                "with linespoints title id",
            ]
        ) + "\n"
    layout = _PLOTS.get(command)
    if layout is None:
        raise PlotError(f"no plot layout for command {command!r}")
    if layout["logx"]:
        head.append("set logscale x")
    if layout["logy"]:
        head.append("set logscale y")
    head += [f'set xlabel "{layout["xlabel"]}"', f'set ylabel "{layout["ylabel"]}"']
    series = [f'"{report_name}" using {x}:{y} with linespoints title "{title}"' for x, y, title in layout["series"]]
    return "\n".join(head + ["plot " + ", \\\n     ".join(series)]) + "\n"


def emit_plot_script(report_path: str | Path, command: str) -> Path:
    """Write ``<report stem>.gp`` next to a CSV report; nothing is plotted here."""
    report_path = Path(report_path)
    if command not in COLUMNS or (command not in _PLOTS and command != "diagnostics"):
        raise PlotError(f"no plot layout for command {command!r}")
    if not report_path.is_file():
        raise FileNotFoundError(f"report {report_path} does not exist")
    with open(report_path, newline="") as fh:
        header = next(csv.reader(fh), None)
        if header is None or tuple(header) != COLUMNS[command]:
            raise PlotError(f"{report_path} is not a CSV {command} report")
        lemma_ids: list[str] = []
        if command == "diagnostics":
            for row in csv.reader(fh):
                if row and row[0] not in lemma_ids:
                    lemma_ids.append(row[0])
    script = report_path.with_suffix(".gp")
    script.write_text(plot_script_text(report_path.name, command, lemma_ids))
    return script
