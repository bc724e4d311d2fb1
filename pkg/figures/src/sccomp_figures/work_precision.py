"""Work-precision figure: error against evaluation cost, log-log.

One curve per method id found in the input CSVs, plus dashed guide
lines showing reference slopes for orders 4, 6, 8 and 10.  Rows whose
status is not ``ok`` or whose plotted values are not finite are
skipped, so partially failed sweeps still plot.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np
from matplotlib.figure import Figure

from .csvio import read_table, usable
from .figspec import GUIDE_ORDERS, FigureSpec, color_map, output_paths


def gather_curves(spec: FigureSpec) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """Per-method (cost, error) arrays in first-appearance order."""
    order: list[str] = []
    points: dict[str, list[tuple[float, float]]] = {}
    wanted = set(spec.methods) if spec.methods else None
    for path in spec.inputs:
        table = read_table(path)
        for name in (spec.cost_column, spec.error_column):
            if name not in table.columns:
                known = ", ".join(table.columns)
                raise ValueError(
                    f"{path}: no column named {name!r} (columns: {known})"
                )
        for row in table.rows:
            method = row.get("method", "")
            if wanted is not None and method not in wanted:
                continue
            if not usable(row, spec.cost_column, spec.error_column):
                continue
            if method not in points:
                order.append(method)
                points[method] = []
            points[method].append(
                (float(row[spec.cost_column]), float(row[spec.error_column]))
            )
    curves = []
    for method in order:
        pairs = sorted(points[method])
        costs = np.array([c for c, _ in pairs])
        errors = np.array([e for _, e in pairs])
        curves.append((method, costs, errors))
    if not curves:
        raise ValueError(
            f"no usable rows for columns {spec.cost_column!r}/"
            f"{spec.error_column!r} in: {', '.join(spec.inputs)}"
        )
    return curves


def _guide_lines(ax, curves) -> None:
    costs = np.concatenate([c for _, c, _ in curves])
    errors = np.concatenate([e for _, _, e in curves])
    # positive values only; log-log axes cannot place the rest
    costs, errors = costs[costs > 0], errors[errors > 0]
    if costs.size == 0:
        return
    x_lo, x_hi = costs.min(), costs.max()
    if x_lo == x_hi:
        x_lo, x_hi = x_lo / 2, x_hi * 2
    anchor_x = np.exp(np.mean(np.log(costs)))
    anchor_y = np.exp(np.mean(np.log(errors)))
    span = np.array([x_lo, x_hi])
    for order in GUIDE_ORDERS:
        guide = anchor_y * (span / anchor_x) ** (-float(order))
        ax.plot(span, guide, linestyle="--", linewidth=0.9, color="0.55", zorder=1)
        ax.annotate(
            str(order),
            (span[0], guide[0]),
            textcoords="offset points",
            xytext=(-2, 2),
            ha="right",
            fontsize=8,
            color="0.35",
        )


def build_figure(spec: FigureSpec) -> Figure:
    curves = gather_curves(spec)
    colors = color_map(spec, [method for method, _, _ in curves])
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.subplots()
    ax.set_xscale("log")
    ax.set_yscale("log")
    for method, costs, errors in curves:
        ax.plot(
            costs, errors, marker="o", markersize=3.5, linewidth=1.3,
            color=colors[method], label=method, zorder=3,
        )
    _guide_lines(ax, curves)
    ax.set_xlabel(spec.xlabel or spec.cost_column.replace("_", " "))
    ax.set_ylabel(spec.ylabel or spec.error_column.replace("_", " "))
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=9)
    fig.tight_layout()
    return fig


def plot_work_precision(spec: FigureSpec, out: str) -> tuple[str, str]:
    fig = build_figure(spec)
    png, svg = output_paths(out)
    fig.savefig(png, dpi=150)
    fig.savefig(svg)
    return png, svg


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-work-precision",
        description="Log-log error-vs-cost figure from benchmark CSV files.",
    )
    parser.add_argument("--in", dest="inputs", nargs="+", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--error-column", default="energy_mean_rel")
    parser.add_argument("--cost-column", default="effective_evals")
    parser.add_argument("--methods", nargs="+")
    parser.add_argument("--title")
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        inputs=args.inputs,
        kind="work_precision",
        error_column=args.error_column,
        cost_column=args.cost_column,
        methods=args.methods,
        title=args.title,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
    )
    try:
        png, svg = plot_work_precision(spec, args.out)
    except (ValueError, OSError) as bad:
        print(f"error: {bad}", file=sys.stderr)
        return 2
    print(f"wrote {png} and {svg}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
