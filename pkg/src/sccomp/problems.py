"""Benchmark systems with exact split flows.

Two systems exercise the integrators:

* planar gravitational two-body motion, split into a kinetic drift and a
  potential kick, both solvable in closed form and analytic in a complex
  state, with tangent maps for symplecticity studies;

* a linear reaction-diffusion equation with periodic boundary on [0, 1),
  split into the diffusion part (diagonal in frequency space, applied via a
  radix-2 transform) and a pointwise potential multiplication.

Complex time steps keep both splits well defined: the drift and kick are
entire in the step, the diffusion multipliers need a positive real part of
the step, and the complex square root in the kick is guarded to stay on the
principal branch.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .engine import SplitSystem, StepFailure

# --- planar two-body problem ----------------------------------------------


def kepler_init(e: float) -> np.ndarray:
    """Periapsis start (q1, q2, p1, p2) for eccentricity e in [0, 1)."""
    if not 0.0 <= e < 1.0:
        raise ValueError(f"eccentricity must lie in [0, 1), got {e}")
    return np.array([1.0 - e, 0.0, 0.0, math.sqrt((1.0 + e) / (1.0 - e))])


def kepler_energy(state: np.ndarray) -> float:
    """Total energy p.p/2 - 1/r of a real state; the origin is rejected."""
    q1, q2, p1, p2 = (float(v) for v in np.asarray(state, dtype=np.float64))
    r = math.hypot(q1, q2)
    if r == 0.0:
        raise ValueError("radius vanished, energy undefined")
    return 0.5 * (p1 * p1 + p2 * p2) - 1.0 / r


def kepler_drift(h: complex, state: np.ndarray) -> np.ndarray:
    q1, q2, p1, p2 = (complex(v) for v in state)
    return np.array([q1 + h * p1, q2 + h * p2, p1, p2])


def kepler_kick(h: complex, state: np.ndarray) -> np.ndarray:
    q1, q2, p1, p2 = (complex(v) for v in state)
    r2 = q1 * q1 + q2 * q2
    # principal-branch guard: the complex radius must keep Re(r^2) > 0
    if r2.real <= 0.0:
        raise StepFailure("complex radius left the principal branch")
    r3 = r2 * cmath.sqrt(r2)
    s = h / r3
    return np.array([q1, q2, p1 - s * q1, p2 - s * q2])


def kepler_drift_tangent(h: complex, state: np.ndarray, jac: np.ndarray) -> np.ndarray:
    out = np.array(jac, dtype=np.complex128)
    out[0] += h * jac[2]
    out[1] += h * jac[3]
    return out


def kepler_kick_tangent(h: complex, state: np.ndarray, jac: np.ndarray) -> np.ndarray:
    q1, q2 = complex(state[0]), complex(state[1])
    r2 = q1 * q1 + q2 * q2
    if r2.real <= 0.0:
        raise StepFailure("complex radius left the principal branch")
    r = cmath.sqrt(r2)
    r5 = r2 * r2 * r
    m11 = (r2 - 3.0 * q1 * q1) / r5
    m12 = -3.0 * q1 * q2 / r5
    m22 = (r2 - 3.0 * q2 * q2) / r5
    out = np.array(jac, dtype=np.complex128)
    out[2] -= h * (m11 * jac[0] + m12 * jac[1])
    out[3] -= h * (m12 * jac[0] + m22 * jac[1])
    return out


def kepler_system() -> SplitSystem:
    return SplitSystem(
        dimension=4,
        flow_a=kepler_drift,
        flow_b=kepler_kick,
        tangent_a=kepler_drift_tangent,
        tangent_b=kepler_kick_tangent,
    )


# --- radix-2 discrete Fourier transform -----------------------------------


@dataclass(frozen=True)
class DftPlan:
    """Precomputed permutation and per-stage twiddle factors for a radix-2
    decimation-in-time transform.  Forward is unnormalized; the inverse
    carries the 1/N factor."""

    n: int
    bit_reverse: np.ndarray
    forward_twiddles: tuple[np.ndarray, ...]
    inverse_twiddles: tuple[np.ndarray, ...]


def dft_plan(n: int) -> DftPlan:
    if n < 2 or n & (n - 1) != 0:
        raise ValueError(f"transform length must be a power of two >= 2, got {n}")
    rev = np.array([0], dtype=np.intp)
    while len(rev) < n:
        rev = np.concatenate([2 * rev, 2 * rev + 1])
    forward = []
    inverse = []
    m = 2
    while m <= n:
        angles = -2.0j * np.pi * np.arange(m // 2) / m
        forward.append(np.exp(angles))
        inverse.append(np.exp(-angles))
        m *= 2
    return DftPlan(
        n=n,
        bit_reverse=rev,
        forward_twiddles=tuple(forward),
        inverse_twiddles=tuple(inverse),
    )


def _transform(plan: DftPlan, values: np.ndarray, twiddles) -> np.ndarray:
    x = np.asarray(values, dtype=np.complex128)[plan.bit_reverse].copy()
    m = 2
    for tw in twiddles:
        half = m // 2
        y = x.reshape(-1, m)
        odd = y[:, half:] * tw
        even = y[:, :half].copy()
        y[:, :half] = even + odd
        y[:, half:] = even - odd
        m *= 2
    return x


def dft(plan: DftPlan, values: np.ndarray) -> np.ndarray:
    """Forward transform, unnormalized."""
    if len(values) != plan.n:
        raise ValueError("value length does not match the plan")
    return _transform(plan, values, plan.forward_twiddles)


def idft(plan: DftPlan, spectrum: np.ndarray) -> np.ndarray:
    """Inverse transform with the 1/N normalization."""
    if len(spectrum) != plan.n:
        raise ValueError("spectrum length does not match the plan")
    return _transform(plan, spectrum, plan.inverse_twiddles) / plan.n


# --- periodic reaction-diffusion grid -------------------------------------


def grid_points(n: int) -> np.ndarray:
    return np.arange(n) / n


def potential_samples(n: int, amplitude: float = 4.0, offset: float = 8.0) -> np.ndarray:
    """Reaction coefficient offset + amplitude*sin(2 pi x) on the grid."""
    return offset + amplitude * np.sin(2.0 * np.pi * grid_points(n))


def spectral_multipliers(n: int) -> np.ndarray:
    """Diffusion eigenvalues -(2 pi k)^2 with signed frequencies; the
    Nyquist entry is -(pi n)^2."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    return -((2.0 * np.pi * k) ** 2)


@dataclass(frozen=True)
class ParabolicGrid:
    """Grid state plus the static data both flows need."""

    values: np.ndarray
    potential: np.ndarray
    multipliers: np.ndarray
    plan: DftPlan

    @property
    def n(self) -> int:
        return self.plan.n


def parabolic_grid(
    n: int = 128,
    values: np.ndarray | None = None,
    amplitude: float = 4.0,
    offset: float = 8.0,
) -> ParabolicGrid:
    """Default initial profile sin(2 pi x) on n points (n a power of two)."""
    plan = dft_plan(n)
    if values is None:
        values = np.sin(2.0 * np.pi * grid_points(n)).astype(np.complex128)
    else:
        values = np.asarray(values, dtype=np.complex128)
        if len(values) != n:
            raise ValueError("initial values do not match the grid size")
    return ParabolicGrid(
        values=values,
        potential=potential_samples(n, amplitude, offset),
        multipliers=spectral_multipliers(n),
        plan=plan,
    )


def parabolic_flow_b(h: complex, grid: ParabolicGrid) -> ParabolicGrid:
    """Pointwise reaction flow: multiply by exp(h V(x_j))."""
    return replace(grid, values=grid.values * np.exp(h * grid.potential))


def parabolic_flow_a(h: complex, grid: ParabolicGrid) -> ParabolicGrid:
    """Diffusion flow: scale each frequency by exp(h lambda_k)."""
    spectrum = dft(grid.plan, grid.values)
    spectrum *= np.exp(h * grid.multipliers)
    return replace(grid, values=idft(grid.plan, spectrum))


def parabolic_system(grid: ParabolicGrid) -> SplitSystem:
    """Engine view of the grid: flows over bare value arrays."""
    plan, mult, pot = grid.plan, grid.multipliers, grid.potential

    def flow_a(h: complex, values: np.ndarray) -> np.ndarray:
        spectrum = dft(plan, values)
        spectrum *= np.exp(h * mult)
        return idft(plan, spectrum)

    def flow_b(h: complex, values: np.ndarray) -> np.ndarray:
        return values * np.exp(h * pot)

    return SplitSystem(dimension=grid.n, flow_a=flow_a, flow_b=flow_b)


def parabolic_reference(t: float, grid: ParabolicGrid) -> np.ndarray:
    """Dense-matrix reference state at time t.

    Assembles the diffusion operator from explicit transform matrices
    (independent of the radix-2 kernel), adds the diagonal reaction term
    and applies the scaling-and-squaring matrix exponential.
    """
    n = grid.n
    if n > 512:
        raise ValueError("dense reference is limited to grids of at most 512 points")
    j = np.arange(n)
    forward = np.exp(-2.0j * np.pi * np.outer(j, j) / n)
    inverse = np.exp(2.0j * np.pi * np.outer(j, j) / n) / n
    diffusion = (inverse * grid.multipliers[np.newaxis, :]) @ forward
    generator = diffusion.real + np.diag(grid.potential)
    propagator = scipy.linalg.expm(t * generator)
    return propagator @ grid.values


def write_grid_csv(path: str, grid: ParabolicGrid) -> None:
    """Grid state as rows (x_j, Re U_j, Im U_j)."""
    x = grid_points(grid.n)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "re_u", "im_u"])
        for xi, ui in zip(x, grid.values):
            writer.writerow(
                [format(xi, ".17g"), format(ui.real, ".17g"), format(ui.imag, ".17g")]
            )
