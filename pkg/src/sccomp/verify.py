"""Self-contained invariant suite behind the ``verify`` CLI command.

Each check is small, named, and deterministic for a fixed seed; the CLI
turns any failure into a nonzero exit.  Slow trajectory-level claims live
in the test suite and the benchmark commands, not here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import coefficients as co
from .analysis import defect_window, estimate_order, symplecticity_defect
from .engine import (
    apply_basic,
    apply_recursion,
    apply_row,
    apply_table,
    fourth_order_complex_splitting,
    strang_splitting,
)
from .problems import dft, dft_plan, idft, kepler_init, kepler_system


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def _random_states(seed: int, count: int) -> np.ndarray:
    # Bounded perturbations of the reference orbit keep the radius away
    # from the complex-branch guard.
    rng = _rng(seed)
    base = kepler_init(0.6)
    return base + 0.05 * rng.standard_normal((count, 4))


def check_fraction_roots() -> CheckResult:
    worst = 0.0
    ok = True
    for n in range(1, 7):
        ok = ok and co.verify_fraction_root(n)
        g = co.conjugate_fraction(n).value
        power = 2 * n + 1
        worst = max(worst, abs(g**power + g.conjugate() ** power))
    return CheckResult(
        "fraction-roots", ok and worst < 1e-13,
        f"max odd-power residual {worst:.3e} over n=1..6",
    )


def check_row_consistency() -> CheckResult:
    worst = 0.0
    for table in _all_tables():
        for row in table.rows:
            worst = max(worst, abs(sum(row.coefficients) - 1.0))
        total = 2 * sum(float(row.weight) for row in table.rows)
        worst = max(worst, abs(total - 1.0))
    return CheckResult(
        "row-consistency", worst < 1e-13, f"max row-sum deviation {worst:.3e}"
    )


def _all_tables() -> list[co.CompositionTable]:
    tables = [co.basic_table(2)]
    for k in (1, 2, 3):
        tables.append(co.combination_table(2, k))
        tables.append(co.recursion_table(2, k))
        tables.append(co.triple_jump_table(2, k, complex_coefficients=True))
        tables.append(co.triple_jump_table(2, k, complex_coefficients=False))
    return tables


def check_condition_sums() -> CheckResult:
    worst = 0.0
    for k in (1, 2, 3):
        for build in (co.combination_table, co.recursion_table):
            report = co.order_condition_sums(build(2, k), 2)
            worst = max(worst, report.max_magnitude)
    return CheckResult(
        "condition-sums", worst < 1e-12, f"max required-sum magnitude {worst:.3e}"
    )


def check_level_one_agreement() -> CheckResult:
    t1 = co.combination_table(2, 1)
    r1 = co.recursion_table(2, 1)
    same = t1.rows == r1.rows and t1.row_length == r1.row_length
    return CheckResult(
        "level-one-agreement", same, "first combination and recursion tables match"
    )


def check_recursion_vs_table(seed: int) -> CheckResult:
    method = fourth_order_complex_splitting()
    system = kepler_system()
    table = co.recursion_table(2, 2)
    worst = 0.0
    for state in _random_states(seed, 5):
        h = 0.05
        via_table = apply_table(table, method, system, h, state)
        via_recursion = apply_recursion(2, 2, method, system, h, state)
        worst = max(
            worst,
            float(np.linalg.norm(via_table - via_recursion))
            / float(np.linalg.norm(via_table)),
        )
    return CheckResult(
        "recursion-vs-table", worst < 1e-14, f"max relative gap {worst:.3e}"
    )


def check_conjugation_equivariance(seed: int) -> CheckResult:
    # Exact in real arithmetic; floating point may differ in the last ulp
    # of the complex square root, so the bound is tight but not bitwise.
    system = kepler_system()
    rng = _rng(seed)
    worst = 0.0
    for state in _random_states(seed, 5):
        z = state.astype(np.complex128) + 0.01j * rng.standard_normal(4)
        h = complex(0.03, 0.01)
        for flow in (system.flow_a, system.flow_b):
            left = np.conj(flow(h, z))
            right = flow(np.conj(h), np.conj(z))
            worst = max(
                worst, float(np.linalg.norm(left - right) / np.linalg.norm(left))
            )
    return CheckResult(
        "conjugation-equivariance", worst < 1e-15, f"max relative gap {worst:.3e}"
    )


def check_full_vs_half_table(seed: int) -> CheckResult:
    # A stored row's implied partner is the whole branch conjugated, which
    # conjugates the chain coefficients and the basic scheme's stages both.
    method = fourth_order_complex_splitting()
    partner = method.conjugate()
    system = kepler_system()
    table = co.combination_table(2, 2)
    worst = 0.0
    for state in _random_states(seed, 3):
        half = apply_table(table, method, system, 0.05, state)
        full = np.zeros(4, dtype=np.complex128)
        for row in table.rows:
            weight = float(row.weight)
            full += weight * apply_row(row.coefficients, method, system, 0.05, state)
            conj_row = tuple(np.conj(c) for c in row.coefficients)
            full += weight * apply_row(conj_row, partner, system, 0.05, state)
        worst = max(
            worst,
            float(np.linalg.norm(full.real - half) / np.linalg.norm(half)),
        )
    return CheckResult(
        "full-vs-half-table", worst < 1e-15, f"max relative gap {worst:.3e}"
    )


def check_dft_oracle(seed: int) -> CheckResult:
    rng = _rng(seed)
    n = 128
    plan = dft_plan(n)
    values = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    fast = dft(plan, values)
    indices = np.arange(n)
    naive = np.exp(-2j * np.pi * np.outer(indices, indices) / n) @ values
    gap = float(np.linalg.norm(fast - naive) / np.linalg.norm(naive))
    back = idft(plan, fast)
    round_trip = float(np.linalg.norm(back - values) / np.linalg.norm(values))
    passed = gap < 1e-12 and round_trip < 1e-13
    return CheckResult(
        "dft-oracle", passed, f"naive gap {gap:.3e}, round trip {round_trip:.3e}"
    )


def check_worker_determinism(seed: int) -> CheckResult:
    method = fourth_order_complex_splitting()
    system = kepler_system()
    table = co.combination_table(2, 2)
    ok = True
    for state in _random_states(seed, 5):
        outputs = [
            apply_table(table, method, system, 0.05, state, workers=w)
            for w in (1, 2, 4, 8)
        ]
        ok = ok and all(np.array_equal(outputs[0], out) for out in outputs[1:])
    return CheckResult(
        "worker-determinism", ok, "identical bits across 1/2/4/8 workers"
    )


def check_cost_cells() -> CheckResult:
    # Serial-map counts per step followed by the effective counts at 4
    # and 32 threads, per level.
    serial = {
        ("T", 1): 2, ("T", 2): 8, ("T", 3): 32,
        ("R-explicit", 1): 2, ("R-explicit", 2): 16, ("R-explicit", 3): 512,
        ("R-recursive", 1): 2, ("R-recursive", 2): 8, ("R-recursive", 3): 32,
    }
    effective = {
        ("T", 1, 2): 2, ("T", 2, 2): 4, ("T", 3, 2): 8,
        ("R-explicit", 1, 2): 2, ("R-explicit", 2, 2): 4, ("R-explicit", 3, 2): 128,
        ("T", 1, 5): 2, ("T", 2, 5): 4, ("T", 3, 5): 8,
        ("R-explicit", 1, 5): 2, ("R-explicit", 2, 5): 4, ("R-explicit", 3, 5): 16,
    }
    ok = all(
        co.cost_model(kind, k, 0) == want for (kind, k), want in serial.items()
    ) and all(
        co.cost_model(kind, k, threads) == want
        for (kind, k, threads), want in effective.items()
    )
    return CheckResult("cost-cells", ok, "serial and threaded map counts match")


def check_json_round_trip() -> CheckResult:
    ok = True
    for table in _all_tables():
        clone = co.table_from_json(co.table_to_json(table))
        ok = ok and clone.rows == table.rows and clone.kind == table.kind
        before = co.order_condition_sums(table, 2).sums
        after = co.order_condition_sums(clone, 2).sums
        ok = ok and before == after
    return CheckResult("json-round-trip", ok, "tables survive export bit for bit")


def check_real_palindromic_floor() -> CheckResult:
    # All-real palindromic compositions must invert exactly: run the
    # real second-order scheme and its real chain extension forward then
    # backward and compare against the start.
    strang = strang_splitting()
    system = kepler_system()
    x0 = kepler_init(0.6)
    scale = float(np.linalg.norm(x0))
    worst = 0.0
    for table in (co.basic_table(1), co.triple_jump_table(1, 1, complex_coefficients=False)):
        for h in (0.3, 0.1):
            forward = apply_table(table, strang, system, h, x0)
            back = apply_table(table, strang, system, -h, forward)
            worst = max(worst, float(np.linalg.norm(back - x0)) / scale)
    return CheckResult(
        "real-palindromic-floor", worst < 1e-14, f"round-trip defect {worst:.3e}"
    )


def check_tangent_defect_slope() -> CheckResult:
    method = fourth_order_complex_splitting()
    system = kepler_system()
    table = co.combination_table(2, 1)
    x0 = kepler_init(0.6)
    steps = [0.35, 0.28, 0.22, 0.18, 0.14, 0.11, 0.09, 0.07]
    pairs = [
        (h, symplecticity_defect(table, method, system, h, x0)) for h in steps
    ]
    kept = defect_window(pairs, 1.0)
    if len(kept) < 4:
        return CheckResult("tangent-defect-slope", False, "window too small")
    est = estimate_order(kept)
    passed = est.conclusive and abs(est.slope - 12.0) <= 0.8
    return CheckResult(
        "tangent-defect-slope",
        passed,
        f"slope {est.slope:.3f} over {est.points} points",
    )


def run_checks(seed: int = 0) -> list[CheckResult]:
    checks: list[Callable[[], CheckResult]] = [
        check_fraction_roots,
        check_row_consistency,
        check_condition_sums,
        check_level_one_agreement,
        lambda: check_recursion_vs_table(seed),
        lambda: check_conjugation_equivariance(seed),
        lambda: check_full_vs_half_table(seed),
        lambda: check_dft_oracle(seed),
        lambda: check_worker_determinism(seed),
        check_cost_cells,
        check_json_round_trip,
        check_real_palindromic_floor,
        check_tangent_defect_slope,
    ]
    return [check() for check in checks]


def format_report(results: list[CheckResult]) -> str:
    lines = []
    for result in results:
        mark = "PASS" if result.passed else "FAIL"
        lines.append(f"{mark} {result.name}: {result.detail}")
    failed = sum(1 for result in results if not result.passed)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)
