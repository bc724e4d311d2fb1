"""Figure scripts for the benchmark CSV output of the sccomp CLI.

The plotting layer reads the documented CSV schema and never
recomputes numerics; the CSV files are the single source of truth.
"""

from .csvio import TableData, numeric_column, read_table
from .energy_time import plot_energy_time
from .figspec import METHOD_COLORS, FigureSpec
from .work_precision import plot_work_precision

__all__ = [
    "FigureSpec",
    "METHOD_COLORS",
    "TableData",
    "numeric_column",
    "plot_energy_time",
    "plot_work_precision",
    "read_table",
]
