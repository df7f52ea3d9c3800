"""CSV experiment reports with an embedded provenance block."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path


def fmt(v) -> str:
    """Floats in scientific notation with 6 significant digits; everything else via ``str``."""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.5e}"
    if hasattr(v, "dtype") and v.dtype.kind == "f":
        return fmt(float(v))
    return str(v)


@dataclass
class ExperimentReport:
    header: list
    rows: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def add(self, *values) -> None:
        if len(values) != len(self.header):
            raise ValueError(f"row has {len(values)} values, header has {len(self.header)}")
        self.rows.append(list(values))

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [r[i] for r in self.rows]

    def records(self) -> list:
        return [dict(zip(self.header, r)) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.provenance):
            buf.write(f"# {key}: {json.dumps(self.provenance[key], sort_keys=True, default=str)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv())
