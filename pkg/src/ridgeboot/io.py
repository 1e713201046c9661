"""CSV ingestion and report emission.

Input files are plain comma-separated reals with no header by default
(``header=True`` skips one line).  Malformed entries are reported with
their 1-based line and column.  Reports are written twice: a machine
CSV where each row is ``key,value...`` (vectors spread across the row,
floats in shortest round-trip form so identical runs emit identical
bytes) and a small human-readable summary.
"""

from __future__ import annotations

import os
from typing import Iterable

import numpy as np

from .errors import DataError


def load_matrix(path: str, header: bool = False) -> np.ndarray:
    """Read a dense real matrix; every row must have the same width."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if header:
        lines = lines[1:]
    rows: list[list[float]] = []
    width = None
    for lineno, line in enumerate(lines, start=2 if header else 1):
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DataError(
                f"{path}: line {lineno} has {len(cells)} columns, expected {width}"
            )
        row = []
        for col, cell in enumerate(cells, start=1):
            try:
                row.append(float(cell))
            except ValueError:
                raise DataError(
                    f"{path}: line {lineno}, column {col}: not a number: {cell.strip()!r}"
                ) from None
        rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")
    matrix = np.array(rows)
    if not np.all(np.isfinite(matrix)):
        raise DataError(f"{path}: entries must all be finite")
    return matrix


def load_vector(path: str, header: bool = False) -> np.ndarray:
    """Read a real vector (one value per line, or a single CSV row/column)."""
    matrix = load_matrix(path, header)
    if 1 not in matrix.shape:
        raise DataError(
            f"{path}: expected a vector, found a {matrix.shape[0]}x{matrix.shape[1]} matrix"
        )
    return matrix.reshape(-1)


def _format_value(value: object) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def report_lines(items: Iterable[tuple[str, object]]) -> list[str]:
    """key,value rows; array values spread along the row."""
    lines = []
    for key, value in items:
        if isinstance(value, np.ndarray):
            cells = [_format_value(v) for v in value.reshape(-1)]
        elif isinstance(value, (list, tuple)):
            cells = [_format_value(v) for v in value]
        else:
            cells = [_format_value(value)]
        lines.append(",".join([key] + cells))
    return lines


def write_report(path: str, items: Iterable[tuple[str, object]]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(report_lines(items)) + "\n")


def write_table(path: str, header: list[str], rows: np.ndarray) -> None:
    """Plot-data table: one header line, then CSV rows of floats."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(",".join(header) + "\n")
        for row in np.atleast_2d(rows):
            handle.write(",".join(repr(float(v)) for v in row) + "\n")


def write_summary(path: str, title: str, lines: Iterable[str]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(title + "\n")
        handle.write("=" * len(title) + "\n")
        for line in lines:
            handle.write(line + "\n")
