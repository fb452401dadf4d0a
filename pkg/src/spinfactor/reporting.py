"""Deterministic report records and their JSON/CSV emission.

The JSON document is {"payload": ..., "timing": ...}: everything inside
"payload" is a pure function of the experiment configuration (identical
config and seed reproduce it byte-for-byte), while wall clock and
timestamp live outside it.  Keys are emitted sorted and every float with
17 significant digits, so payload serialization is canonical.  CSV output
carries the config echo as '#' comment lines, then one row per item (or
per row of the report's designated table, e.g. orbit residual series).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import __version__


def format_number(value) -> str:
    """17-significant-digit decimal form, round-trip safe for float64."""
    return format(float(value), ".17g")


def _coerce(value):
    """Reduce numpy scalars/arrays and complex values to JSON-able trees."""
    if isinstance(value, dict):
        return {str(k): _coerce(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_coerce(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_coerce(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [_coerce(value.real), _coerce(value.imag)]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if value is None or isinstance(value, str):
        return value
    raise TypeError(f"cannot serialize {type(value)!r}")


def _emit(obj, out: io.StringIO):
    if obj is None:
        out.write("null")
    elif obj is True:
        out.write("true")
    elif obj is False:
        out.write("false")
    elif isinstance(obj, str):
        out.write('"')
        for ch in obj:
            if ch in '"\\':
                out.write("\\" + ch)
            elif ord(ch) < 0x20:
                out.write(f"\\u{ord(ch):04x}")
            else:
                out.write(ch)
        out.write('"')
    elif isinstance(obj, int):
        out.write(str(obj))
    elif isinstance(obj, float):
        out.write(format_number(obj))
    elif isinstance(obj, list):
        out.write("[")
        for i, v in enumerate(obj):
            if i:
                out.write(",")
            _emit(v, out)
        out.write("]")
    elif isinstance(obj, dict):
        out.write("{")
        for i, k in enumerate(sorted(obj)):
            if i:
                out.write(",")
            _emit(k, out)
            out.write(":")
            _emit(obj[k], out)
        out.write("}")
    else:  # pragma: no cover - _coerce guards this
        raise TypeError(f"cannot serialize {type(obj)!r}")


def canonical_json_bytes(obj) -> bytes:
    """Sorted-key JSON with 17-significant-digit floats."""
    out = io.StringIO()
    _emit(_coerce(obj), out)
    return out.getvalue().encode("utf-8")


@dataclass
class Table:
    columns: tuple
    rows: list

    def as_payload(self) -> dict:
        return {"columns": list(self.columns), "rows": _coerce(self.rows)}


@dataclass
class Report:
    command: str
    config: dict
    items: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    passed: bool = True
    csv_table: str | None = None
    wall_clock_s: float = 0.0
    timestamp: str = ""

    def payload(self) -> dict:
        return {
            "command": self.command,
            "config": _coerce(self.config),
            "items": _coerce(self.items),
            "tables": {k: t.as_payload() for k, t in self.tables.items()},
            "passed": bool(self.passed),
            "version": __version__,
        }

    def payload_bytes(self) -> bytes:
        return canonical_json_bytes(self.payload())

    def document(self) -> dict:
        return {
            "payload": self.payload(),
            "timing": {
                "wall_clock_s": self.wall_clock_s,
                "timestamp": self.timestamp,
            },
        }


def _csv_cell(value) -> str:
    value = _coerce(value)
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (list, dict)):
        raise TypeError("CSV rows must be flat; nested values belong in JSON output")
    text = str(value)
    if any(c in text for c in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def render_csv(report: Report) -> str:
    lines = [f"# command={report.command}"]
    for key in sorted(report.config):
        if key == "command":
            continue
        lines.append(f"# {key}={_csv_cell(report.config[key])}")
    lines.append(f"# passed={'true' if report.passed else 'false'}")
    if report.csv_table is not None:
        table = report.tables[report.csv_table]
        lines.append(",".join(table.columns))
        for row in table.rows:
            lines.append(",".join(_csv_cell(v) for v in row))
    elif report.items:
        columns = sorted(report.items[0])
        lines.append(",".join(columns))
        for item in report.items:
            lines.append(",".join(_csv_cell(item.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def render_json(report: Report) -> bytes:
    return canonical_json_bytes(report.document()) + b"\n"


def emit_report(report: Report, path: str, fmt: str = "json") -> None:
    """Write the report; 'json' gives one canonical object, 'csv' one row
    per item (or per designated table row)."""
    if fmt == "json":
        data = render_json(report)
    elif fmt == "csv":
        data = render_csv(report).encode("utf-8")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "wb") as fh:
        fh.write(data)
