"""Energy-error history figure: relative error against time, log y-axis.

Consumes the long-run CSV layout (one row per observer sample) and
draws one band per method.  Flat bands mean the error oscillates
without accumulating; a rising band is genuine drift.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np
from matplotlib.figure import Figure

from .csvio import read_table, usable
from .figspec import FigureSpec, color_map, output_paths


def gather_series(spec: FigureSpec) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """Per-method (time, error) arrays in first-appearance order."""
    order: list[str] = []
    points: dict[str, list[tuple[float, float]]] = {}
    wanted = set(spec.methods) if spec.methods else None
    for path in spec.inputs:
        table = read_table(path)
        for name in ("t", spec.error_column):
            if name not in table.columns:
                known = ", ".join(table.columns)
                raise ValueError(
                    f"{path}: no column named {name!r} (columns: {known})"
                )
        for row in table.rows:
            method = row.get("method", "")
            if wanted is not None and method not in wanted:
                continue
            if not usable(row, "t", spec.error_column):
                continue
            if method not in points:
                order.append(method)
                points[method] = []
            points[method].append(
                (float(row["t"]), float(row[spec.error_column]))
            )
    if not order:
        raise ValueError(
            f"no data rows with columns t/{spec.error_column!r} in: "
            f"{', '.join(spec.inputs)}"
        )
    series = []
    for method in order:
        pairs = sorted(points[method])
        times = np.array([t for t, _ in pairs])
        errors = np.array([e for _, e in pairs])
        series.append((method, times, errors))
    return series


def build_figure(spec: FigureSpec) -> Figure:
    series = gather_series(spec)
    colors = color_map(spec, [method for method, _, _ in series])
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.subplots()
    ax.set_yscale("log")
    for method, times, errors in series:
        ax.plot(
            times, errors, linewidth=0.9, color=colors[method],
            label=method, zorder=3,
        )
    ax.set_xlabel(spec.xlabel or "time")
    ax.set_ylabel(spec.ylabel or spec.error_column.replace("_", " "))
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=9)
    fig.tight_layout()
    return fig


def plot_energy_time(spec: FigureSpec, out: str) -> tuple[str, str]:
    fig = build_figure(spec)
    png, svg = output_paths(out)
    fig.savefig(png, dpi=150)
    fig.savefig(svg)
    return png, svg


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-energy-time",
        description="Relative-error history figure from long-run CSV files.",
    )
    parser.add_argument("--in", dest="inputs", nargs="+", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--error-column", default="energy_rel_error")
    parser.add_argument("--methods", nargs="+")
    parser.add_argument("--title")
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        inputs=args.inputs,
        kind="energy_time",
        error_column=args.error_column,
        methods=args.methods,
        title=args.title,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
    )
    try:
        png, svg = plot_energy_time(spec, args.out)
    except (ValueError, OSError) as bad:
        print(f"error: {bad}", file=sys.stderr)
        return 2
    print(f"wrote {png} and {svg}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
