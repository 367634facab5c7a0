"""Self-describing curve tables written as CSV or JSON.

CSV layout: ``# key=value`` metadata lines, one header row, then data rows.
Floats are written with 17 significant digits so a re-parse is bit-exact.
"""
import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np


def _fmt(v):
    if isinstance(v, str):
        return v
    return "%.17g" % v


def _parse(v):
    try:
        return float(v)
    except ValueError:
        return v


@dataclass
class CurveTable:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} entries, header has {width}")

    def column(self, name):
        j = self.columns.index(name)
        values = [row[j] for row in self.rows]
        if all(not isinstance(v, str) for v in values):
            return np.array(values, dtype=float)
        return values

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}={value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CurveTable":
        meta = {}
        body = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            elif line:
                body.append(line)
        reader = csv.reader(body)
        columns = next(reader)
        rows = [[_parse(v) for v in row] for row in reader]
        return cls(columns, rows, meta)

    def to_json(self) -> str:
        rows = [[v if isinstance(v, str) else float(v) for v in row] for row in self.rows]
        return json.dumps(
            {"metadata": {k: str(v) for k, v in self.metadata.items()}, "columns": self.columns, "rows": rows},
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "CurveTable":
        data = json.loads(text)
        return cls(data["columns"], data["rows"], data["metadata"])

    def render(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")
