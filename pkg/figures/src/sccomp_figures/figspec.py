"""Figure description shared by the two plot scripts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

METHOD_COLORS: Mapping[str, str] = {
    "basic": "tab:blue",
    "T1": "tab:orange",
    "T2": "tab:green",
    "T3": "tab:red",
}

# Deterministic colors for method ids outside the fixed palette, assigned
# in order of first appearance across the input files.
FALLBACK_CYCLE = (
    "tab:purple",
    "tab:brown",
    "tab:pink",
    "tab:gray",
    "tab:olive",
    "tab:cyan",
)

GUIDE_ORDERS = (4, 6, 8, 10)


@dataclass(frozen=True)
class FigureSpec:
    inputs: Sequence[str]
    kind: str = "work_precision"  # or "energy_time"
    error_column: str = "energy_mean_rel"
    cost_column: str = "effective_evals"
    methods: Sequence[str] | None = None
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    styles: Mapping[str, str] = field(default_factory=lambda: METHOD_COLORS)


def color_map(spec: FigureSpec, method_ids: Sequence[str]) -> dict[str, str]:
    assigned: dict[str, str] = {}
    spare = iter(FALLBACK_CYCLE)
    for method in method_ids:
        if method in spec.styles:
            assigned[method] = spec.styles[method]
        else:
            assigned[method] = next(spare, "black")
    return assigned


def output_paths(out: str) -> tuple[str, str]:
    """PNG and SVG sibling paths derived from the requested output."""
    lower = out.lower()
    if lower.endswith(".png"):
        stem = out[:-4]
    elif lower.endswith(".svg"):
        stem = out[:-4]
    else:
        stem = out
    return stem + ".png", stem + ".svg"
