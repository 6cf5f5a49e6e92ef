"""CSV tables, JSON metadata and gnuplot scripts for command-line runs."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

SIG_DIGITS = 9


def format_number(x) -> str:
    """Locale-free fixed-precision rendering used for every CSV cell."""
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"  # folds -0.0 as well
    return f"{x:.{SIG_DIGITS}g}"


@dataclass
class Table:
    """Column-oriented numeric table; headers carry units in brackets."""

    columns: list[str]
    rows: list[Sequence] = field(default_factory=list)

    @classmethod
    def from_columns(cls, named: dict[str, Sequence]) -> "Table":
        names = list(named)
        data = [np.asarray(v).ravel() for v in named.values()]
        n = {len(d) for d in data}
        if len(n) != 1:
            raise ValueError(f"columns have different lengths: {sorted(n)}")
        return cls(names, [list(r) for r in zip(*data)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([format_number(x) for x in row])
        return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def plot_script(csv_name: str, columns: list[str], title: str, *, x: int = 1, logy: bool = False) -> str:
    """Gnuplot commands drawing every other column against column ``x``."""
    lines = [
        f"# {title}",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{columns[x - 1]}'",
        f"set title '{title}'",
    ]
    if logy:
        lines.append("set logscale y")
    series = [
        f"'{csv_name}' using {x}:{k} with lines"
        for k in range(1, len(columns) + 1)
        if k != x
    ]
    lines.append("plot " + ", \\\n     ".join(series))
    return "\n".join(lines) + "\n"


def write_outputs(
    table: Table,
    out: Path,
    metadata: dict,
    *,
    title: str,
    x: int = 1,
    logy: bool = False,
    extra: dict[str, Table] | None = None,
) -> list[Path]:
    """Write ``out`` (CSV) plus ``.json`` metadata and ``.gp`` plot script beside it."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    written = [out]
    out.write_text(table.to_csv(), encoding="utf-8")
    for suffix, t in (extra or {}).items():
        path = out.with_name(f"{out.stem}_{suffix}.csv")
        path.write_text(t.to_csv(), encoding="utf-8")
        written.append(path)
    gp = out.with_suffix(".gp")
    gp.write_text(plot_script(out.name, table.columns, title, x=x, logy=logy), encoding="utf-8")
    meta = out.with_suffix(".json")
    meta.write_text(dumps(metadata), encoding="utf-8")
    return written + [gp, meta]
