"""Turns integration runs into measurable claims.

Everything here consumes the engine's public surface: convergence-order
estimates from (h, error) ladders, round-trip symmetry and tangent-map
symplecticity defects of a single macro step, long-run energy-drift
summaries, and work-precision sweeps priced by the thread-cost model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .coefficients import CompositionTable, basic_table, combination_table
from .engine import (
    BasicMethod,
    SplitSystem,
    StepFailure,
    apply_table,
    fourth_order_complex_splitting,
    integrate,
    propagate_tangent,
)
from .problems import (
    kepler_energy,
    kepler_init,
    kepler_system,
    parabolic_grid,
    parabolic_reference,
    parabolic_system,
)

# Errors below this are treated as roundoff noise and excluded from fits.
ROUNDOFF_FLOOR = 1e3 * np.finfo(float).eps

# Fits get a ceiling as well: points coarser than this sit outside the
# power-law regime on both benchmark problems.
DEFECT_CEILING = 1e-3


@dataclass(frozen=True)
class SlopeEstimate:
    """Least-squares slope of log(error) against log(h).

    ``conclusive`` is False when fewer than four ladder points survived
    the floor/ceiling filter; slope and intercept are NaN in that case.
    The residual is the root-mean-square misfit in log space and is part
    of the result on purpose: a large residual means the ladder was not
    in a clean power-law regime and the slope should not be trusted.
    """

    slope: float
    intercept: float
    residual: float
    h_window: tuple[float, float]
    points: int
    conclusive: bool


def estimate_order(
    pairs: Sequence[tuple[float, float]],
    floor: float = ROUNDOFF_FLOOR,
    ceiling: float | None = None,
) -> SlopeEstimate:
    """Fit error ~ C * h**p over the points between floor and ceiling.

    ``pairs`` is an (h, error) ladder with h strictly decreasing and all
    errors positive; at least four points must be supplied and at least
    four must survive the filter for a conclusive estimate.
    """
    if len(pairs) < 4:
        raise ValueError(f"need at least 4 ladder points, got {len(pairs)}")
    hs = [float(h) for h, _ in pairs]
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("step sizes must be strictly decreasing")
    if any(e <= 0 for _, e in pairs):
        raise ValueError("errors must be positive")
    kept = [
        (h, e)
        for h, e in pairs
        if e > floor and (ceiling is None or e <= ceiling)
    ]
    if len(kept) < 4:
        return SlopeEstimate(
            slope=float("nan"),
            intercept=float("nan"),
            residual=float("nan"),
            h_window=(float("nan"), float("nan")),
            points=len(kept),
            conclusive=False,
        )
    log_h = np.log([h for h, _ in kept])
    log_e = np.log([e for _, e in kept])
    design = np.vstack([log_h, np.ones_like(log_h)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, log_e, rcond=None)
    misfit = log_e - design @ np.array([slope, intercept])
    return SlopeEstimate(
        slope=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(misfit**2))),
        h_window=(min(h for h, _ in kept), max(h for h, _ in kept)),
        points=len(kept),
        conclusive=True,
    )


def defect_window(
    pairs: Sequence[tuple[float, float]], scale: float
) -> list[tuple[float, float]]:
    """Restrict a defect ladder to [1e3*eps*scale, 1e-3*scale].

    Below the lower edge the defect is roundoff; above the upper edge the
    leading power no longer dominates.  Callers must check that at least
    four points survive before fitting.
    """
    lo = ROUNDOFF_FLOOR * scale
    hi = DEFECT_CEILING * scale
    return [(h, d) for h, d in pairs if lo <= d <= hi]


def symmetry_defect(
    table: CompositionTable,
    method: BasicMethod,
    system: SplitSystem,
    h: float,
    x: np.ndarray,
) -> float:
    """Relative round-trip error of one forward plus one backward step."""
    x = np.asarray(x, dtype=float)
    forward = apply_table(table, method, system, h, x)
    back = apply_table(table, method, system, -h, forward)
    return float(np.linalg.norm(back - x) / np.linalg.norm(x))


def canonical_form(dimension: int) -> np.ndarray:
    """Block form [[0, I], [-I, 0]] for states ordered positions-then-momenta."""
    if dimension % 2 != 0:
        raise ValueError(f"phase-space dimension must be even, got {dimension}")
    half = dimension // 2
    eye = np.eye(half)
    zero = np.zeros((half, half))
    return np.block([[zero, eye], [-eye, zero]])


def symplecticity_defect(
    table: CompositionTable,
    method: BasicMethod,
    system: SplitSystem,
    h: float,
    x: np.ndarray,
    form: np.ndarray | None = None,
) -> float:
    """Frobenius norm of J^T.Omega.J - Omega for one projected macro step."""
    if form is None:
        form = canonical_form(system.dimension)
    _, jac = propagate_tangent(table, method, system, h, np.asarray(x, dtype=float))
    return float(np.linalg.norm(jac.T @ form @ jac - form))


@dataclass(frozen=True)
class DriftSummary:
    mean_rel: float
    max_rel: float
    drift_ratio: float


def energy_drift(energies: Sequence[float], reference: float) -> DriftSummary:
    """Summarize an energy series against its initial value.

    drift_ratio compares the mean relative error over the last tenth of
    the run with the first tenth; values near one mean the error is
    oscillating rather than accumulating.  An exactly conserved head and
    tail give ratio one; a conserved head with a nonzero tail gives inf.
    """
    if not energies:
        raise ValueError("energy series is empty")
    if reference == 0:
        raise ValueError("reference energy must be nonzero")
    rel = [abs(value - reference) / abs(reference) for value in energies]
    chunk = max(1, len(rel) // 10)
    head = float(np.mean(rel[:chunk]))
    tail = float(np.mean(rel[-chunk:]))
    if head == 0.0:
        ratio = 1.0 if tail == 0.0 else float("inf")
    else:
        ratio = tail / head
    return DriftSummary(
        mean_rel=float(np.mean(rel)), max_rel=float(np.max(rel)), drift_ratio=ratio
    )


# --- work-precision records -------------------------------------------------

CSV_COLUMNS = (
    "method",
    "kind",
    "n",
    "k",
    "h",
    "steps",
    "serial_evals",
    "effective_evals",
    "log2_threads",
    "energy_mean_rel",
    "final_state_rel",
    "symmetry_defect",
    "symplecticity_defect",
    "status",
)


@dataclass(frozen=True)
class WorkPrecisionRecord:
    method: str
    kind: str
    n: int
    k: int
    h: float
    steps: int
    serial_evals: int
    effective_evals: int
    log2_threads: int
    energy_mean_rel: float
    final_state_rel: float
    symmetry_defect: float
    symplecticity_defect: float
    status: str = "ok"

    def __post_init__(self) -> None:
        if self.effective_evals > self.serial_evals:
            raise ValueError("effective evaluations cannot exceed serial count")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_records_csv(
    path: str,
    records: Iterable[WorkPrecisionRecord],
    config: Mapping[str, object] | None = None,
) -> None:
    """One row per record; '#' comment lines carry the resolved config."""
    lines = []
    for key in sorted(config or {}):
        lines.append(f"# {key}={config[key]}")
    lines.append(",".join(CSV_COLUMNS))
    for rec in records:
        lines.append(
            ",".join(
                [
                    rec.method,
                    rec.kind,
                    str(rec.n),
                    str(rec.k),
                    _fmt(rec.h),
                    str(rec.steps),
                    str(rec.serial_evals),
                    str(rec.effective_evals),
                    str(rec.log2_threads),
                    _fmt(rec.energy_mean_rel),
                    _fmt(rec.final_state_rel),
                    _fmt(rec.symmetry_defect),
                    _fmt(rec.symplecticity_defect),
                    rec.status,
                ]
            )
        )
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


ENERGY_COLUMNS = ("method", "kind", "n", "k", "h", "t", "energy_rel_error")


def write_energy_csv(
    path: str,
    series: Iterable[tuple[CompositionTable, float, Sequence[tuple[float, float]]]],
    config: Mapping[str, object] | None = None,
) -> None:
    """Time series of relative energy error, one row per observer sample."""
    lines = []
    for key in sorted(config or {}):
        lines.append(f"# {key}={config[key]}")
    lines.append(",".join(ENERGY_COLUMNS))
    for table, h, samples in series:
        for t, err in samples:
            lines.append(
                ",".join(
                    [
                        table.method_id,
                        table.kind,
                        str(table.n),
                        str(table.k),
                        _fmt(h),
                        _fmt(t),
                        _fmt(err),
                    ]
                )
            )
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


# --- benchmark runners ------------------------------------------------------


def kepler_reference_state(
    eccentricity: float, t_final: float, resolution_steps: int
) -> np.ndarray:
    """Trajectory reference: a much finer run of the strongest method.

    ``resolution_steps`` should be the finest step count of the sweep the
    reference will serve; the reference itself runs 20x finer.
    """
    table = combination_table(2, 3)
    method = fourth_order_complex_splitting()
    system = kepler_system()
    steps = 20 * resolution_steps
    state, _ = integrate(
        table, method, system, t_final / steps, steps, kepler_init(eccentricity)
    )
    return state


def kepler_record(
    table: CompositionTable,
    steps: int,
    *,
    eccentricity: float = 0.6,
    t_final: float = 20 * math.pi,
    log2_threads: int = 0,
    method: BasicMethod | None = None,
    reference_state: np.ndarray | None = None,
    with_defects: bool = False,
    workers: int = 1,
) -> WorkPrecisionRecord:
    """One work-precision cell on the eccentric-orbit problem."""
    if method is None:
        method = fourth_order_complex_splitting()
    system = kepler_system()
    x0 = kepler_init(eccentricity)
    h = t_final / steps
    base = dict(
        method=table.method_id,
        kind=table.kind,
        n=table.n,
        k=table.k,
        h=h,
        steps=steps,
        serial_evals=steps * table.serial_cost(),
        effective_evals=steps * table.effective_cost(log2_threads),
        log2_threads=log2_threads,
    )
    energies: list[float] = []

    def observer(index: int, time: float, state: np.ndarray) -> None:
        energies.append(kepler_energy(state))

    try:
        final, _ = integrate(
            table, method, system, h, steps, x0, observer=observer, workers=workers
        )
    except StepFailure as failure:
        nan = float("nan")
        return WorkPrecisionRecord(
            energy_mean_rel=nan,
            final_state_rel=nan,
            symmetry_defect=nan,
            symplecticity_defect=nan,
            status=f"failed: {failure}",
            **base,
        )
    h0 = kepler_energy(x0)
    drift = energy_drift(energies, h0)
    if reference_state is not None:
        final_rel = float(
            np.linalg.norm(final - reference_state)
            / np.linalg.norm(reference_state)
        )
    else:
        final_rel = float("nan")
    if with_defects:
        sym = symmetry_defect(table, method, system, h, x0)
        symp = symplecticity_defect(table, method, system, h, x0)
    else:
        sym = float("nan")
        symp = float("nan")
    return WorkPrecisionRecord(
        energy_mean_rel=drift.mean_rel,
        final_state_rel=final_rel,
        symmetry_defect=sym,
        symplecticity_defect=symp,
        **base,
    )


def parabolic_record(
    table: CompositionTable,
    steps: int,
    *,
    size: int = 128,
    t_final: float = 1.0,
    log2_threads: int = 0,
    method: BasicMethod | None = None,
    reference: np.ndarray | None = None,
    workers: int = 1,
) -> WorkPrecisionRecord:
    """One work-precision cell on the periodic reaction-diffusion problem."""
    if method is None:
        method = fourth_order_complex_splitting()
    grid = parabolic_grid(size)
    system = parabolic_system(grid)
    if reference is None:
        reference = parabolic_reference(t_final, grid)
    h = t_final / steps
    base = dict(
        method=table.method_id,
        kind=table.kind,
        n=table.n,
        k=table.k,
        h=h,
        steps=steps,
        serial_evals=steps * table.serial_cost(),
        effective_evals=steps * table.effective_cost(log2_threads),
        log2_threads=log2_threads,
    )
    nan = float("nan")
    try:
        final, _ = integrate(
            table, method, system, h, steps, grid.values, workers=workers
        )
    except StepFailure as failure:
        return WorkPrecisionRecord(
            energy_mean_rel=nan,
            final_state_rel=nan,
            symmetry_defect=nan,
            symplecticity_defect=nan,
            status=f"failed: {failure}",
            **base,
        )
    rel = float(np.linalg.norm(final - reference) / np.linalg.norm(reference))
    return WorkPrecisionRecord(
        energy_mean_rel=nan,
        final_state_rel=rel,
        symmetry_defect=nan,
        symplecticity_defect=nan,
        **base,
    )


def efficiency_sweep(
    tables: Sequence[CompositionTable],
    problem: str,
    h_list: Sequence[float],
    log2_threads: int,
    *,
    t_final: float | None = None,
    run_cell: Callable[[CompositionTable, int], WorkPrecisionRecord] | None = None,
    **problem_kwargs: object,
) -> list[WorkPrecisionRecord]:
    """All (table, h) cells in input order; failed cells carry a status.

    Step counts are round(t_final / h); the recorded h is the exact
    t_final / steps actually used.  ``run_cell`` overrides the per-cell
    runner (tests use this) and then ``problem`` is only documentation.
    """
    if not tables or not h_list:
        raise ValueError("need at least one method and one step size")
    if problem == "kepler":
        t_final = 20 * math.pi if t_final is None else t_final
        if run_cell is None:

            def run_cell(table: CompositionTable, steps: int) -> WorkPrecisionRecord:
                return kepler_record(
                    table,
                    steps,
                    t_final=t_final,
                    log2_threads=log2_threads,
                    **problem_kwargs,  # type: ignore[arg-type]
                )

    elif problem == "parabolic":
        t_final = 1.0 if t_final is None else t_final
        if run_cell is None:
            size = int(problem_kwargs.pop("size", 128))
            grid = parabolic_grid(size)
            reference = parabolic_reference(t_final, grid)

            def run_cell(table: CompositionTable, steps: int) -> WorkPrecisionRecord:
                return parabolic_record(
                    table,
                    steps,
                    size=size,
                    t_final=t_final,
                    log2_threads=log2_threads,
                    reference=reference,
                    **problem_kwargs,  # type: ignore[arg-type]
                )

    elif run_cell is None:
        raise ValueError(f"unknown problem {problem!r}")
    records = []
    for table in tables:
        for h in h_list:
            steps = max(1, round(t_final / h))
            records.append(run_cell(table, steps))
    return records


def equal_cost_steps(
    tables: Sequence[CompositionTable], budget: int, log2_threads: int
) -> list[int]:
    """Step counts that spend the same effective-evaluation budget."""
    counts = []
    for table in tables:
        per_step = table.effective_cost(log2_threads)
        if budget % per_step:
            raise ValueError(
                f"budget {budget} is not a multiple of the per-step cost "
                f"{per_step} of {table.method_id}"
            )
        counts.append(budget // per_step)
    return counts
