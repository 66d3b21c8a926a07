"""CSV (RFC 4180) and JSON serialisation of sweep tables.

Numbers are written in scientific notation with 17 significant digits so a
parsed file reproduces the stored doubles exactly.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .sweep import SweepTable


def fmt(x: float) -> str:
    return f"{x:.16e}"


def table_to_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow([*table.columns, "status"])
    for row, status in zip(table.data, table.status):
        writer.writerow([*(fmt(v) for v in row), status])
    return buf.getvalue()


def table_from_csv(text: str) -> SweepTable:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if header[-1] != "status":
        raise ValueError("CSV table must end with a status column")
    data = np.array([[float(v) for v in r[:-1]] for r in body], dtype=float).reshape(len(body), len(header) - 1)
    return SweepTable(tuple(header[:-1]), data, tuple(r[-1] for r in body))


def table_to_json(table: SweepTable) -> str:
    lines = []
    for row, status in zip(table.data, table.status):
        items = [f"{json.dumps(c)}: {fmt(v)}" for c, v in zip(table.columns, row)]
        items.append(f'"status": {json.dumps(status)}')
        lines.append("  {" + ", ".join(items) + "}")
    return "[\n" + ",\n".join(lines) + "\n]\n"


def table_from_json(text: str) -> SweepTable:
    records = json.loads(text)
    if not records:
        raise ValueError("empty JSON table")
    columns = tuple(k for k in records[0] if k != "status")
    data = np.array([[rec[c] for c in columns] for rec in records], dtype=float)
    return SweepTable(columns, data, tuple(rec.get("status", "ok") for rec in records))


def write_table(table: SweepTable, path, fmt_name: str | None = None) -> Path:
    path = Path(path)
    kind = fmt_name or ("json" if path.suffix.lower() == ".json" else "csv")
    text = table_to_json(table) if kind == "json" else table_to_csv(table)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def read_table(path) -> SweepTable:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    return table_from_json(text) if path.suffix.lower() == ".json" else table_from_csv(text)
