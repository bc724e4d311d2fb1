"""Step-fraction tables for complex-coefficient composition integrators.

A composition integrator repeats a basic scheme of (even) order 2n with
complex step fractions.  Two families are built here as weighted tables of
symmetric-conjugate coefficient rows:

* ``combination_table`` (kind ``"T"``): at each level the previous rows are
  scaled by an order-raising fraction and its conjugate and concatenated,
  doubling the row length.  Level k yields 2**(k-1) independent rows of
  2**k coefficients, each weighted 1/2**k with the conjugate rows implied.

* ``recursion_table`` (kind ``"R-explicit"``): the flat expansion of the
  average/compose recursion.  Level k yields 2**(2**k - 2) independent rows
  of 2**k coefficients, each weighted 2**(1 - 2**k).

The classic triple-jump chains (real and complex) are provided in the same
table form for comparison runs, as is the trivial single-row table that
wraps the bare basic scheme.

Weights are stored as exact dyadic rationals and only converted to floating
point at evaluation time.  Conjugate rows are never stored: evaluation
doubles the real part instead.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

KIND_COMBINATION = "T"
KIND_RECURSION = "R-explicit"
KIND_RECURSION_NESTED = "R-recursive"
KIND_TRIPLE_JUMP_REAL = "triple-jump-real"
KIND_TRIPLE_JUMP_COMPLEX = "triple-jump-complex"
KIND_BASIC = "basic"

TABLE_KINDS = (
    KIND_COMBINATION,
    KIND_RECURSION,
    KIND_TRIPLE_JUMP_REAL,
    KIND_TRIPLE_JUMP_COMPLEX,
    KIND_BASIC,
)

# Levels above 3 carry no convergence guarantee; the cap keeps table sizes sane.
K_MAX_COMBINATION = 4
K_MAX_RECURSION = 3


@dataclass(frozen=True)
class ConjugateFraction:
    """Complex fraction of the unit step used to raise the order by two.

    ``value + conj(value) == 1`` and ``value**(2n+1)`` is purely imaginary,
    so the odd power cancels against its conjugate exactly.
    """

    n: int
    value: complex

    @property
    def modulus(self) -> float:
        return abs(self.value)

    @property
    def argument(self) -> float:
        return cmath.phase(self.value)


def conjugate_fraction(n: int) -> ConjugateFraction:
    """Smallest-phase fraction splitting a step of an order-2n scheme.

    The value is 1/2 + (i/2) sin(t)/(1 + cos(t)) with t = pi/(2n+1); its
    argument is t/2 and its modulus 1/(2 cos(t/2)).
    """
    if n < 1:
        raise ValueError(f"order half-index must be >= 1, got {n}")
    theta = math.pi / (2 * n + 1)
    imag = 0.5 * math.sin(theta) / (1.0 + math.cos(theta))
    return ConjugateFraction(n=n, value=complex(0.5, imag))


def verify_fraction_root(n: int, tol: float = 1e-13) -> bool:
    """Check the defining identities of ``conjugate_fraction(n)``.

    Consistency (value plus conjugate equals one) must hold exactly in
    floating point; the root condition on the odd power must hold to ``tol``.
    """
    g = conjugate_fraction(n).value
    if g + g.conjugate() != 1.0:
        return False
    power = 2 * n + 1
    return abs(g**power + g.conjugate() ** power) < tol


def triple_jump_real(n: int) -> tuple[float, float]:
    """Real step pair (outer, inner) of the order-raising triple jump.

    outer = 1/(2 - 2**(1/(2n+1))), inner = 1 - 2*outer.  The inner step is
    negative for every n, which is what the complex variant avoids.
    """
    if n < 1:
        raise ValueError(f"order half-index must be >= 1, got {n}")
    root = 2.0 ** (1.0 / (2 * n + 1))
    outer = 1.0 / (2.0 - root)
    return outer, 1.0 - 2.0 * outer


def _triple_jump_residual(alpha: complex, power: int) -> complex:
    return 2.0 * alpha**power + (1.0 - 2.0 * alpha) ** power


def triple_jump_complex(n: int) -> tuple[complex, complex]:
    """Complex step pair (outer, inner) of the triple jump.

    Solves 2*a**(2n+1) + (1 - 2a)**(2n+1) = 0 for the non-real root with
    positive real part and smallest phase, taking the representative with
    negative imaginary part.  A closed-form seed a = z/(2**(1/(2n+1)) + 2z)
    with z = exp(i*pi/(2n+1)) is polished by Newton iteration and the
    polynomial identity is verified to 1e-12 before returning.
    """
    if n < 1:
        raise ValueError(f"order half-index must be >= 1, got {n}")
    power = 2 * n + 1
    z = cmath.exp(1j * math.pi / power)
    seed = z / (2.0 ** (1.0 / power) + 2.0 * z)
    alpha = seed.conjugate()  # negative imaginary part by convention
    for _ in range(8):
        deriv = 2.0 * power * alpha ** (power - 1) - 2.0 * power * (
            1.0 - 2.0 * alpha
        ) ** (power - 1)
        alpha -= _triple_jump_residual(alpha, power) / deriv
    if abs(_triple_jump_residual(alpha, power)) >= 1e-12:
        raise ArithmeticError(f"triple-jump root did not converge for n={n}")
    if alpha.real <= 0.0 or alpha.imag >= 0.0:
        raise ArithmeticError(f"triple-jump root landed off-convention for n={n}")
    return alpha, 1.0 - 2.0 * alpha


@dataclass(frozen=True)
class CompositionRow:
    """One stored composition: step coefficients (leftmost applied last) and
    the dyadic weight it carries in the table sum."""

    coefficients: tuple[complex, ...]
    weight: Fraction

    def conjugated(self) -> "CompositionRow":
        return CompositionRow(
            coefficients=tuple(c.conjugate() for c in self.coefficients),
            weight=self.weight,
        )

    def coefficient_sum(self) -> complex:
        return sum(self.coefficients, 0j)


@dataclass(frozen=True)
class CompositionTable:
    """Weighted set of independent composition rows for one integrator.

    ``conjugate_closure`` means every stored row stands for itself plus its
    element-wise conjugate; evaluation doubles the real part accordingly, so
    twice the stored weights sums to one.
    """

    kind: str
    n: int
    k: int
    rows: tuple[CompositionRow, ...]
    conjugate_closure: bool = True
    conjectural: bool = False

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def row_length(self) -> int:
        return len(self.rows[0].coefficients)

    @property
    def method_id(self) -> str:
        if self.kind == KIND_BASIC:
            return "basic"
        if self.kind == KIND_COMBINATION:
            return f"T{self.k}"
        if self.kind == KIND_RECURSION:
            return f"R{self.k}"
        if self.kind == KIND_TRIPLE_JUMP_REAL:
            return f"TJr{self.k}"
        return f"TJc{self.k}"

    @property
    def order(self) -> int:
        return 2 * (self.n + self.k)

    def serial_cost(self) -> int:
        """Basic-scheme applications per macro step, one worker."""
        return self.row_count * self.row_length

    def effective_cost(self, log2_threads: int) -> int:
        """Per-step cost with independent rows spread over 2**log2_threads
        workers, floored at the length of a single composition."""
        if log2_threads < 0:
            raise ValueError("log2_threads must be >= 0")
        return max(self.row_length, self.serial_cost() >> log2_threads)


def _conjugate_closed(rows: Iterable[tuple[complex, ...]]) -> list[tuple[complex, ...]]:
    rows = list(rows)
    return rows + [tuple(c.conjugate() for c in row) for row in rows]


def combination_table(n: int, k: int) -> CompositionTable:
    """Independent rows of the level-k linear-combination method (kind "T").

    Level 1 is the single row (g, conj g) with g = conjugate_fraction(n).
    Each further level scales every row of the previous full set (stored
    rows plus conjugates) by the next order-raising fraction and appends the
    conjugate-scaled copy.
    """
    if n < 1:
        raise ValueError(f"order half-index must be >= 1, got {n}")
    if not 1 <= k <= K_MAX_COMBINATION:
        raise ValueError(
            f"combination level must be in [1, {K_MAX_COMBINATION}], got {k}"
        )
    g = conjugate_fraction(n).value
    independent = [(g, g.conjugate())]
    full = _conjugate_closed(independent)
    for level in range(2, k + 1):
        g = conjugate_fraction(n + level - 1).value
        independent = [
            tuple(g * c for c in row) + tuple(g.conjugate() * c for c in row)
            for row in full
        ]
        full = _conjugate_closed(independent)
    weight = Fraction(1, 2**k)
    rows = tuple(CompositionRow(row, weight) for row in independent)
    return CompositionTable(
        kind=KIND_COMBINATION,
        n=n,
        k=k,
        rows=rows,
        conjugate_closure=True,
        conjectural=k > 3,
    )


def recursion_table(n: int, k: int) -> CompositionTable:
    """Flat expansion of the average/compose recursion (kind "R-explicit").

    Level 1 coincides with the combination table.  Each further level pairs
    every full row u with every full row v of the previous level into the
    row (g*u, conj(g)*v); the swapped products are exactly the conjugates
    and stay implied.
    """
    if n < 1:
        raise ValueError(f"order half-index must be >= 1, got {n}")
    if not 1 <= k <= K_MAX_RECURSION:
        raise ValueError(
            f"recursion level must be in [1, {K_MAX_RECURSION}], got {k}"
        )
    g = conjugate_fraction(n).value
    independent = [(g, g.conjugate())]
    full = _conjugate_closed(independent)
    for level in range(2, k + 1):
        g = conjugate_fraction(n + level - 1).value
        independent = [
            tuple(g * c for c in u) + tuple(g.conjugate() * c for c in v)
            for u in full
            for v in full
        ]
        full = _conjugate_closed(independent)
    weight = Fraction(1, 2 ** (2**k - 1))
    rows = tuple(CompositionRow(row, weight) for row in independent)
    return CompositionTable(kind=KIND_RECURSION, n=n, k=k, rows=rows)


def triple_jump_table(
    n: int, k: int, complex_coefficients: bool = True
) -> CompositionTable:
    """Level-k triple-jump chain as a single-row table of 3**k coefficients.

    The row is real for the classic chain and complex for the variant with
    the smallest-phase complex root; either way the stored weight 1/2 plus
    the implied conjugate row evaluates to the real projection of the chain.
    """
    if n < 1:
        raise ValueError(f"order half-index must be >= 1, got {n}")
    if k < 1:
        raise ValueError(f"triple-jump level must be >= 1, got {k}")
    chain: list[complex] = [1.0 + 0j]
    for level in range(1, k + 1):
        if complex_coefficients:
            outer, inner = triple_jump_complex(n + level - 1)
        else:
            outer, inner = triple_jump_real(n + level - 1)
        chain = (
            [outer * c for c in chain]
            + [inner * c for c in chain]
            + [outer * c for c in chain]
        )
    kind = KIND_TRIPLE_JUMP_COMPLEX if complex_coefficients else KIND_TRIPLE_JUMP_REAL
    rows = (CompositionRow(tuple(chain), Fraction(1, 2)),)
    return CompositionTable(kind=kind, n=n, k=k, rows=rows)


def basic_table(n: int) -> CompositionTable:
    """Single-row table wrapping the bare basic scheme with real projection."""
    if n < 1:
        raise ValueError(f"order half-index must be >= 1, got {n}")
    rows = (CompositionRow((1.0 + 0j,), Fraction(1, 2)),)
    return CompositionTable(kind=KIND_BASIC, n=n, k=0, rows=rows)


def build_table(kind: str, n: int, k: int) -> CompositionTable:
    """Dispatch on the table kind; ``"TJ"`` selects the complex triple jump."""
    if kind == KIND_COMBINATION:
        return combination_table(n, k)
    if kind in (KIND_RECURSION, "R"):
        return recursion_table(n, k)
    if kind in (KIND_TRIPLE_JUMP_COMPLEX, "TJ"):
        return triple_jump_table(n, k, complex_coefficients=True)
    if kind == KIND_TRIPLE_JUMP_REAL:
        return triple_jump_table(n, k, complex_coefficients=False)
    if kind == KIND_BASIC:
        return basic_table(n)
    raise ValueError(f"unknown table kind {kind!r}")


@dataclass(frozen=True)
class OrderConditionReport:
    """Power sums of the table coefficients and the largest magnitude among
    the sums that the table's (kind, level) requires to vanish."""

    sums: dict[str, complex]
    required: tuple[str, ...]
    max_magnitude: float


def order_condition_sums(table: CompositionTable, n: int) -> OrderConditionReport:
    """Sums of coefficients to the powers 2(n+j)+1, j = 0..2, over the
    independent rows.  The first min(k, 3) sums must vanish for the
    combination, recursion and triple-jump kinds."""
    sums: dict[str, complex] = {}
    labels: list[str] = []
    for j in range(3):
        power = 2 * (n + j) + 1
        label = f"c{power}_1"
        labels.append(label)
        total = 0j
        for row in table.rows:
            total += sum(c**power for c in row.coefficients)
        sums[label] = total
    if table.kind == KIND_BASIC:
        required: tuple[str, ...] = ()
    else:
        required = tuple(labels[: min(table.k, 3)])
    max_mag = max((abs(sums[label]) for label in required), default=0.0)
    return OrderConditionReport(sums=sums, required=required, max_magnitude=max_mag)


def cost_model(kind: str, k: int, log2_threads: int) -> int:
    """Per-step basic-scheme evaluations charged to a level-k method on a
    machine with 2**log2_threads workers.

    Serial totals: 2**k * 2**(k-1) for kind "T" and for the nested
    evaluation "R-recursive"; 2**k * 2**(2**k - 2) for "R-explicit".  The
    flat kinds divide across workers, floored at one composition of length
    2**k; the nested kind cannot split and ignores the worker count.
    """
    if k < 1:
        raise ValueError(f"level must be >= 1, got {k}")
    if log2_threads < 0:
        raise ValueError("log2_threads must be >= 0")
    if kind in (KIND_COMBINATION, KIND_RECURSION_NESTED):
        serial = 2**k * 2 ** (k - 1)
    elif kind == KIND_RECURSION:
        serial = 2**k * 2 ** (2**k - 2)
    else:
        raise ValueError(f"cost model covers T/R kinds, got {kind!r}")
    if kind == KIND_RECURSION_NESTED:
        return serial
    return max(2**k, serial >> log2_threads)


# --- serialization ---------------------------------------------------------
#
# Fixed shallow schema, floats printed with 17 significant digits so that
# re-parsing reproduces every coefficient bit for bit.


def _fmt(value: float) -> str:
    return format(value, ".17g")


def table_to_json(
    table: CompositionTable, report: OrderConditionReport | None = None
) -> str:
    row_chunks = []
    for row in table.rows:
        coeffs = ", ".join(
            f"[{_fmt(c.real)}, {_fmt(c.imag)}]" for c in row.coefficients
        )
        row_chunks.append(
            '    {"weight_num": %d, "weight_den": %d, "coeffs": [%s]}'
            % (row.weight.numerator, row.weight.denominator, coeffs)
        )
    lines = [
        "{",
        f'  "kind": {json.dumps(table.kind)},',
        f'  "n": {table.n},',
        f'  "k": {table.k},',
        '  "rows": [',
        ",\n".join(row_chunks),
        "  ],",
        f'  "conjugate_closure": {"true" if table.conjugate_closure else "false"}',
    ]
    if report is not None:
        sums = ", ".join(
            f"{json.dumps(label)}: [{_fmt(value.real)}, {_fmt(value.imag)}]"
            for label, value in report.sums.items()
        )
        lines[-1] += ","
        lines.append('  "order_conditions": {')
        lines.append(f'    "sums": {{{sums}}},')
        lines.append(f'    "required": {json.dumps(list(report.required))},')
        lines.append(f'    "max_magnitude": {_fmt(report.max_magnitude)}')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def table_from_json(text: str) -> CompositionTable:
    doc = json.loads(text)
    kind = doc["kind"]
    if kind not in TABLE_KINDS:
        raise ValueError(f"unknown table kind {kind!r}")
    rows = tuple(
        CompositionRow(
            coefficients=tuple(complex(re, im) for re, im in entry["coeffs"]),
            weight=Fraction(entry["weight_num"], entry["weight_den"]),
        )
        for entry in doc["rows"]
    )
    k = int(doc["k"])
    return CompositionTable(
        kind=kind,
        n=int(doc["n"]),
        k=k,
        rows=rows,
        conjugate_closure=bool(doc["conjugate_closure"]),
        conjectural=kind == KIND_COMBINATION and k > 3,
    )
