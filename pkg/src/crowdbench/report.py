"""Aggregate report emission: markdown, CSV, and JSON.

Column order mirrors the benchmark tables: the four basic columns
(success / collision / timeout percentages and mean navigation time)
followed by the five metric columns, then the side-preference columns for
the single-human scenarios. CSV and JSON carry full-precision floats and
round-trip losslessly; markdown is formatted for reading.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import fields

from .metrics import AggregateReport

CSV_COLUMNS = [
    "scenario", "episodes", "aborted",
    "success_pct", "collision_pct", "timeout_pct",
    "nav_time_mean", "nav_time_std",
    "m1_mean", "m1_std", "m2_mean", "m2_std", "m3_mean", "m3_std",
    "m4_mean", "m4_std", "m5_mean", "m5_std",
    "side_left_pct", "side_right_pct", "side_undetermined", "side_cases",
]
_INT_COLUMNS = {"episodes", "aborted", "side_undetermined", "side_cases"}


def emit_report(aggregates: dict[str, AggregateReport], fmt: str) -> str:
    if fmt == "markdown":
        return _emit_markdown(aggregates)
    if fmt == "csv":
        return _emit_csv(aggregates)
    if fmt == "json":
        return _emit_json(aggregates)
    raise ValueError(f"unknown report format {fmt!r}")


def _cell(value, spec: str = ".3f") -> str:
    if value is None:
        return "n/a"
    return format(value, spec)


def _pm(mean, std, spec: str = ".3f") -> str:
    if mean is None:
        return "n/a"
    return f"{format(mean, spec)} ± {format(std, spec)}"


def _emit_markdown(aggregates: dict[str, AggregateReport]) -> str:
    lines = [
        "| Scenario | Episodes | Success % | Collision % | Timeout % | Nav. time (s) "
        "| M_I | M_II | M_III (s) | M_IV (m/s^3)^2 | M_V |",
        "|---|---|---|---|---|---|---|---|---|---|---|",
    ]
    for name, agg in aggregates.items():
        lines.append(
            f"| {name} | {agg.episodes} | {_cell(agg.success_pct, '.2f')} "
            f"| {_cell(agg.collision_pct, '.2f')} | {_cell(agg.timeout_pct, '.2f')} "
            f"| {_pm(agg.nav_time_mean, agg.nav_time_std, '.2f')} "
            f"| {_pm(agg.m1_mean, agg.m1_std)} | {_pm(agg.m2_mean, agg.m2_std)} "
            f"| {_pm(agg.m3_mean, agg.m3_std, '.2f')} | {_pm(agg.m4_mean, agg.m4_std)} "
            f"| {_pm(agg.m5_mean, agg.m5_std)} |")
    side_rows = {name: agg for name, agg in aggregates.items()
                 if agg.side_cases > 0 or agg.side_undetermined > 0}
    if side_rows:
        lines += [
            "",
            "| Scenario | Left % | Right % | Undetermined |",
            "|---|---|---|---|",
        ]
        for name, agg in side_rows.items():
            lines.append(
                f"| {name} | {_cell(agg.side_left_pct, '.1f')} "
                f"| {_cell(agg.side_right_pct, '.1f')} | {agg.side_undetermined} |")
    abort_total = sum(a.aborted for a in aggregates.values())
    if abort_total:
        lines += ["", f"Aborted episodes (excluded from all statistics): {abort_total}"]
    return "\n".join(lines) + "\n"


def _emit_csv(aggregates: dict[str, AggregateReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for name, agg in aggregates.items():
        row = [name]
        for col in CSV_COLUMNS[1:]:
            value = getattr(agg, col)
            row.append("" if value is None else repr(value) if isinstance(value, float) else str(value))
        writer.writerow(row)
    return buf.getvalue()


def parse_csv_report(text: str) -> dict[str, AggregateReport]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != CSV_COLUMNS:
        raise ValueError("unrecognized report CSV header")
    out: dict[str, AggregateReport] = {}
    for row in reader:
        values: dict = {}
        for col, cell in zip(CSV_COLUMNS[1:], row[1:]):
            if cell == "":
                values[col] = None
            elif col in _INT_COLUMNS:
                values[col] = int(cell)
            else:
                values[col] = float(cell)
        out[row[0]] = AggregateReport(**values)
    return out


def _emit_json(aggregates: dict[str, AggregateReport]) -> str:
    doc = {"scenarios": {
        name: {f.name: getattr(agg, f.name) for f in fields(AggregateReport)}
        for name, agg in aggregates.items()
    }}
    return json.dumps(doc, indent=2) + "\n"


def parse_json_report(text: str) -> dict[str, AggregateReport]:
    doc = json.loads(text)
    return {name: AggregateReport(**vals) for name, vals in doc["scenarios"].items()}
