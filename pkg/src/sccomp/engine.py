"""Evaluation engine for composition tables over two-part split systems.

States are complex numpy vectors.  A macro step of a table method evaluates
every independent row as a pure branch (optionally on a thread pool), then
reduces serially in ascending row order with exact dyadic weights and
doubles the real part to account for the implied conjugate rows.  Branch
results never depend on scheduling, so the projected output is bit
identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .coefficients import CompositionTable, conjugate_fraction


class StepFailure(RuntimeError):
    """A flow or macro step produced an unusable state (blow-up or a complex
    radius outside the principal branch)."""

    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index


@dataclass
class EvaluationCounter:
    """Tally of basic-scheme applications and elementary flow applications."""

    basic_maps: int = 0
    flows: int = 0


@dataclass(frozen=True)
class BasicMethod:
    """Palindromic splitting scheme: stages interleave as
    b[0] a[0] b[1] a[1] ... b[-1], applied in that order."""

    a_stages: tuple[complex, ...]
    b_stages: tuple[complex, ...]
    half_order: int
    palindromic: bool = True

    @property
    def stage_count(self) -> int:
        return len(self.a_stages) + len(self.b_stages)

    def conjugate(self) -> "BasicMethod":
        return BasicMethod(
            a_stages=tuple(a.conjugate() for a in self.a_stages),
            b_stages=tuple(b.conjugate() for b in self.b_stages),
            half_order=self.half_order,
            palindromic=self.palindromic,
        )

    def validate(self) -> None:
        if len(self.b_stages) != len(self.a_stages) + 1:
            raise ValueError("stage interleaving requires len(b) == len(a) + 1")
        for stages in (self.a_stages, self.b_stages):
            total = sum(stages)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"stage sums must equal 1, got {total}")
        if self.palindromic:
            if self.a_stages != self.a_stages[::-1]:
                raise ValueError("a-stages are not palindromic")
            if self.b_stages != self.b_stages[::-1]:
                raise ValueError("b-stages are not palindromic")


def fourth_order_complex_splitting() -> BasicMethod:
    """Nine-stage palindromic splitting of order 4 with real a-stages and
    complex b-stages whose leading error term is real, so the projected
    scheme keeps its symmetry and symplecticity defects at order 4n+4."""
    b1 = complex(0.060078275263542357774, -0.060314841253378523039)
    a1 = 0.18596881959910913140
    b2 = complex(0.27021183913361078161, 0.15290393229116195895)
    a2 = 0.31403118040089086860
    b3 = complex(0.33941977120569372122, -0.18517818207556687181)
    method = BasicMethod(
        a_stages=(a1, a2, a2, a1),
        b_stages=(b1, b2, b3, b2, b1),
        half_order=2,
    )
    method.validate()
    return method


def strang_splitting() -> BasicMethod:
    """Real second-order splitting, b-first: half B, full A, half B."""
    method = BasicMethod(a_stages=(1.0 + 0j,), b_stages=(0.5 + 0j, 0.5 + 0j), half_order=1)
    method.validate()
    return method


FlowMap = Callable[[complex, np.ndarray], np.ndarray]
TangentMap = Callable[[complex, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SplitSystem:
    """Two-part vector field with exact flows for each part.

    Flows must commute with complex conjugation on conjugated steps:
    conj(flow(h, x)) == flow(conj(h), conj(x)).  Tangent maps, when given,
    return the Jacobian of the flow applied to the incoming Jacobian and
    are evaluated at the pre-flow state.
    """

    dimension: int
    flow_a: FlowMap
    flow_b: FlowMap
    tangent_a: TangentMap | None = None
    tangent_b: TangentMap | None = None


def apply_basic(
    method: BasicMethod,
    system: SplitSystem,
    h: complex,
    x: np.ndarray,
    counter: EvaluationCounter | None = None,
) -> np.ndarray:
    """One application of the basic scheme at step h.  Complex in, complex
    out; non-finite results raise StepFailure."""
    state = np.asarray(x, dtype=np.complex128)
    state = system.flow_b(method.b_stages[0] * h, state)
    for i, a in enumerate(method.a_stages):
        state = system.flow_a(a * h, state)
        state = system.flow_b(method.b_stages[i + 1] * h, state)
    if not np.all(np.isfinite(state)):
        raise StepFailure("non-finite state after basic scheme application")
    if counter is not None:
        counter.basic_maps += 1
        counter.flows += method.stage_count
    return state


def apply_row(
    coefficients: Sequence[complex],
    method: BasicMethod,
    system: SplitSystem,
    h: complex,
    x: np.ndarray,
    counter: EvaluationCounter | None = None,
) -> np.ndarray:
    """Apply the basic scheme once per coefficient, rightmost first."""
    state = np.asarray(x, dtype=np.complex128)
    for alpha in reversed(coefficients):
        state = apply_basic(method, system, alpha * h, state)
    if counter is not None:
        counter.basic_maps += len(coefficients)
        counter.flows += len(coefficients) * method.stage_count
    return state


def _as_real(x: np.ndarray) -> np.ndarray:
    arr = np.asarray(x)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0.0):
            raise ValueError("table evaluation requires a real state")
        return arr.real.astype(np.float64)
    return arr.astype(np.float64)


def apply_table(
    table: CompositionTable,
    method: BasicMethod,
    system: SplitSystem,
    h: float,
    x: np.ndarray,
    *,
    workers: int = 1,
    executor: Executor | None = None,
    counter: EvaluationCounter | None = None,
) -> np.ndarray:
    """One projected macro step of a table method on a real state.

    Branches are pure; the reduction runs single threaded in ascending row
    order and returns 2 * Re(sum of weighted branches).
    """
    if not table.conjugate_closure:
        raise ValueError("table must carry the conjugate-closure flag")
    base = _as_real(x).astype(np.complex128)

    def branch(row) -> np.ndarray:
        return apply_row(row.coefficients, method, system, h, base)

    if executor is not None:
        results = list(executor.map(branch, table.rows))
    elif workers > 1:
        pool_size = min(workers, len(table.rows))
        with ThreadPoolExecutor(max_workers=pool_size) as pool:
            results = list(pool.map(branch, table.rows))
    else:
        results = [branch(row) for row in table.rows]

    acc = np.zeros(base.shape, dtype=np.complex128)
    for row, result in zip(table.rows, results):
        acc += float(row.weight) * result
    if counter is not None:
        counter.basic_maps += table.row_count * table.row_length
        counter.flows += table.row_count * table.row_length * method.stage_count
    return 2.0 * acc.real


def apply_recursion_complex(
    n: int,
    k: int,
    method: BasicMethod,
    system: SplitSystem,
    h: complex,
    x: np.ndarray,
    counter: EvaluationCounter | None = None,
) -> np.ndarray:
    """Literal nested evaluation of the average/compose recursion.

    Level 1 averages the conjugate row pair; level k averages the two
    orderings of level k-1 at the scaled steps.  Costs 4**k basic maps.
    """
    if k < 1:
        raise ValueError(f"level must be >= 1, got {k}")
    state = np.asarray(x, dtype=np.complex128)
    if k == 1:
        g = conjugate_fraction(n).value
        first = apply_row((g, g.conjugate()), method, system, h, state, counter)
        second = apply_row((g.conjugate(), g), method, system, h, state, counter)
        return 0.5 * (first + second)
    g = conjugate_fraction(n + k - 1).value
    inner_a = apply_recursion_complex(
        n, k - 1, method, system, g.conjugate() * h, state, counter
    )
    first = apply_recursion_complex(n, k - 1, method, system, g * h, inner_a, counter)
    inner_b = apply_recursion_complex(n, k - 1, method, system, g * h, state, counter)
    second = apply_recursion_complex(
        n, k - 1, method, system, g.conjugate() * h, inner_b, counter
    )
    return 0.5 * (first + second)


def apply_recursion(
    n: int,
    k: int,
    method: BasicMethod,
    system: SplitSystem,
    h: float,
    x: np.ndarray,
    counter: EvaluationCounter | None = None,
) -> np.ndarray:
    """Projected macro step of the nested recursion on a real state.

    For real input the second ordering is the conjugate of the first, so
    only one ordering is evaluated and the real part taken: 2 * 4**(k-1)
    basic maps per call.
    """
    base = _as_real(x).astype(np.complex128)
    if k == 1:
        g = conjugate_fraction(n).value
        result = apply_row((g, g.conjugate()), method, system, h, base, counter)
    else:
        g = conjugate_fraction(n + k - 1).value
        inner = apply_recursion_complex(
            n, k - 1, method, system, g.conjugate() * h, base, counter
        )
        result = apply_recursion_complex(n, k - 1, method, system, g * h, inner, counter)
    return result.real.copy()


Observer = Callable[[int, float, np.ndarray], None]


def integrate(
    table: CompositionTable | None,
    method: BasicMethod,
    system: SplitSystem,
    h: float,
    steps: int,
    x0: np.ndarray,
    observer: Observer | None = None,
    *,
    workers: int = 1,
    executor: Executor | None = None,
) -> tuple[np.ndarray, EvaluationCounter]:
    """Repeat a projected table step (or the bare basic scheme when table is
    None) ``steps`` times.  The observer sees the real projected state at
    every macro-step boundary; failures abort with the failing step index.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    counter = EvaluationCounter()
    if table is not None:
        state = _as_real(x0)
        for i in range(steps):
            try:
                state = apply_table(
                    table, method, system, h, state,
                    workers=workers, executor=executor, counter=counter,
                )
            except StepFailure as failure:
                raise StepFailure(str(failure), step_index=i) from failure
            if observer is not None:
                observer(i, (i + 1) * h, state)
        return state, counter
    state = np.asarray(x0, dtype=np.complex128)
    for i in range(steps):
        try:
            state = apply_basic(method, system, h, state, counter)
        except StepFailure as failure:
            raise StepFailure(str(failure), step_index=i) from failure
        if observer is not None:
            observer(i, (i + 1) * h, state.real.copy())
    return state, counter


def propagate_basic_tangent(
    method: BasicMethod,
    system: SplitSystem,
    h: complex,
    x: np.ndarray,
    jacobian: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Advance state and Jacobian through one basic scheme application."""
    if system.tangent_a is None or system.tangent_b is None:
        raise ValueError("system does not provide tangent maps")
    state = np.asarray(x, dtype=np.complex128)
    jac = np.asarray(jacobian, dtype=np.complex128)
    step = method.b_stages[0] * h
    jac = system.tangent_b(step, state, jac)
    state = system.flow_b(step, state)
    for i, a in enumerate(method.a_stages):
        step = a * h
        jac = system.tangent_a(step, state, jac)
        state = system.flow_a(step, state)
        step = method.b_stages[i + 1] * h
        jac = system.tangent_b(step, state, jac)
        state = system.flow_b(step, state)
    return state, jac


def propagate_tangent(
    table: CompositionTable,
    method: BasicMethod,
    system: SplitSystem,
    h: float,
    x: np.ndarray,
    jacobian: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """One projected macro step carrying the Jacobian along every branch.

    The Jacobian of the weighted real-projected sum is the weighted
    real-projected sum of the branch Jacobians, both returned as real
    arrays.
    """
    if not table.conjugate_closure:
        raise ValueError("table must carry the conjugate-closure flag")
    base = _as_real(x).astype(np.complex128)
    if jacobian is None:
        jacobian = np.eye(system.dimension)
    jac0 = np.asarray(jacobian, dtype=np.complex128)
    state_acc = np.zeros(base.shape, dtype=np.complex128)
    jac_acc = np.zeros(jac0.shape, dtype=np.complex128)
    for row in table.rows:
        state, jac = base, jac0
        for alpha in reversed(row.coefficients):
            state, jac = propagate_basic_tangent(method, system, alpha * h, state, jac)
        weight = float(row.weight)
        state_acc += weight * state
        jac_acc += weight * jac
    return 2.0 * state_acc.real, 2.0 * jac_acc.real
