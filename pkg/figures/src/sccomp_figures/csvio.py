"""Reader for the benchmark CSV format.

Files start with ``# key=value`` comment lines carrying the resolved run
configuration, followed by a header row and data rows.  Values stay
strings at this layer; plot code converts the columns it needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TableData:
    path: str
    config: dict[str, str]
    columns: tuple[str, ...]
    rows: list[dict[str, str]]


def read_table(path: str) -> TableData:
    config: dict[str, str] = {}
    columns: tuple[str, ...] | None = None
    rows: list[dict[str, str]] = []
    with open(path, "r", encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    config[key.strip()] = value.strip()
                continue
            cells = line.split(",")
            if columns is None:
                columns = tuple(cells)
                continue
            rows.append(dict(zip(columns, cells)))
    if columns is None:
        raise ValueError(f"{path}: no header row found")
    return TableData(path=path, config=config, columns=columns, rows=rows)


def numeric_column(table: TableData, name: str) -> np.ndarray:
    """Column as floats; a missing name reports what is available."""
    if name not in table.columns:
        known = ", ".join(table.columns)
        raise ValueError(
            f"{table.path}: no column named {name!r} (columns: {known})"
        )
    return np.array([float(row[name]) for row in table.rows])


def usable(row: dict[str, str], *names: str) -> bool:
    """True when the row succeeded and every named value is finite."""
    if row.get("status", "ok") != "ok":
        return False
    for name in names:
        try:
            value = float(row[name])
        except (KeyError, ValueError):
            return False
        if not math.isfinite(value):
            return False
    return True
