"""
Output writers

CSV tables, JSON reports at round-trip float precision, gnuplot scripts
that plot a CSV, and fixed-width human tables at 8 significant digits.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

import numpy as np

TABLE_DIGITS = 8

PathLike = Union[str, Path]


def _plain(value: Any) -> Any:
    """numpy scalars/arrays and complex numbers to JSON-friendly Python values."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return str(value)


def to_json(data: Any) -> str:
    # json uses float.__repr__, which round-trips every double.
    return json.dumps(data, indent=2, default=_plain)


def write_json(path: PathLike, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(data) + "\n")
    return path


def _cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return value


def write_csv(path: PathLike, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def records_to_rows(records: Sequence[dict], columns: Sequence[str]) -> list[list[Any]]:
    return [[record.get(c) for c in columns] for record in records]


def write_gnuplot(
    script_path: PathLike,
    csv_path: PathLike,
    x: str,
    ys: Sequence[str],
    columns: Sequence[str],
    title: str = "",
    output: Optional[str] = None,
) -> Path:
    """gnuplot script plotting the named columns of a CSV against x."""
    script_path = Path(script_path)
    index = {name: i + 1 for i, name in enumerate(columns)}
    missing = [c for c in [x, *ys] if c not in index]
    if missing:
        raise ValueError(f"columns not in the CSV: {', '.join(missing)}")

    data = Path(csv_path).name
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{x}'",
    ]
    if title:
        lines.append(f"set title '{title}'")
    if output:
        lines += ["set terminal pngcairo size 900,600", f"set output '{output}'"]
    plots = [f"'{data}' using {index[x]}:{index[y]} with linespoints" for y in ys]
    lines.append("plot " + ", \\\n     ".join(plots))
    script_path.parent.mkdir(parents=True, exist_ok=True)
    script_path.write_text("\n".join(lines) + "\n")
    return script_path


def format_number(value: Any, digits: int = TABLE_DIGITS) -> str:
    if value is None:
        return "-"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{float(value):.{digits}g}"
    if isinstance(value, complex):
        return f"{value.real:.{digits}g}{value.imag:+.{digits}g}i"
    return str(value)


def format_table(columns: Sequence[str], rows: Iterable[Sequence[Any]], digits: int = TABLE_DIGITS) -> str:
    cells = [[format_number(v, digits) for v in row] for row in rows]
    widths = [len(c) for c in columns]
    for row in cells:
        widths = [max(w, len(v)) for w, v in zip(widths, row)]
    header = "  ".join(c.rjust(w) for c, w in zip(columns, widths))
    body = ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join([header, "  ".join("-" * w for w in widths), *body])
