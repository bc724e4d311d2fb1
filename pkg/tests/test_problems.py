"""Model problem tests.

The transform is checked against a naive quadratic-time sum written
here, and the split flows against their closed-form actions on
eigenmodes.  Reference solutions come from the dense propagator.
"""

import numpy as np
import pytest

from sccomp.engine import StepFailure
from sccomp.problems import (
    dft,
    dft_plan,
    grid_points,
    idft,
    kepler_drift,
    kepler_drift_tangent,
    kepler_energy,
    kepler_init,
    kepler_kick,
    kepler_kick_tangent,
    kepler_system,
    parabolic_flow_a,
    parabolic_flow_b,
    parabolic_grid,
    parabolic_reference,
    parabolic_system,
    potential_samples,
    spectral_multipliers,
    write_grid_csv,
)

TWO_PI_SQ = 4.0 * np.pi**2


class TestKeplerSetup:
    def test_documented_initial_state(self):
        state = kepler_init(0.6)
        assert np.array_equal(state, np.array([0.4, 0.0, 0.0, 2.0]))
        assert kepler_energy(state) == pytest.approx(-0.5, abs=1e-15)

    def test_circular_orbit(self):
        state = kepler_init(0.0)
        assert np.array_equal(state, np.array([1.0, 0.0, 0.0, 1.0]))

    def test_energy_is_minus_half_for_any_eccentricity(self):
        for e in (0.0, 0.2, 0.6, 0.9):
            assert kepler_energy(kepler_init(e)) == pytest.approx(-0.5, abs=1e-14)

    def test_rejects_parabolic_and_beyond(self):
        with pytest.raises(ValueError):
            kepler_init(1.0)


class TestKeplerFlows:
    def test_drift_moves_positions_linearly(self):
        state = np.array([0.4, 0.1, -0.3, 2.0], dtype=complex)
        h = 0.37
        out = kepler_drift(h, state)
        assert np.allclose(out[:2], state[:2] + h * state[2:], rtol=0, atol=1e-16)
        assert np.array_equal(out[2:], state[2:])

    def test_kick_follows_inverse_square_pull(self):
        state = np.array([0.4, 0.0, 0.0, 2.0], dtype=complex)
        h = 0.2
        out = kepler_kick(h, state)
        r3 = (state[0] ** 2 + state[1] ** 2) ** 1.5
        assert np.allclose(out[2:], state[2:] - h * state[:2] / r3, rtol=0, atol=1e-16)
        assert np.array_equal(out[:2], state[:2])

    def test_kick_guards_the_principal_branch(self):
        bad = np.array([2j, 0.0, 0.1, 0.1], dtype=complex)
        with pytest.raises(StepFailure):
            kepler_kick(0.1, bad)

    def test_flows_preserve_energy_composition(self):
        # leapfrog with small h stays near the energy surface
        state = kepler_init(0.6).astype(complex)
        h = 1e-3
        for _ in range(100):
            state = kepler_kick(h / 2, state)
            state = kepler_drift(h, state)
            state = kepler_kick(h / 2, state)
        assert abs(kepler_energy(state.real) + 0.5) < 1e-5

    def test_tangent_maps_match_flow_derivatives(self):
        state = kepler_init(0.6).astype(complex)
        h = 0.3
        jac = kepler_drift_tangent(h, state, np.eye(4, dtype=complex))
        want = np.eye(4)
        want[0, 2] = want[1, 3] = h
        assert np.abs(jac - want).max() < 1e-15

        jac_kick = kepler_kick_tangent(h, state, np.eye(4, dtype=complex))
        eps = 1e-7
        for j in range(4):
            bump = np.zeros(4)
            bump[j] = eps
            fd = (
                kepler_kick(h, state + bump) - kepler_kick(h, state - bump)
            ) / (2 * eps)
            assert np.abs(jac_kick[:, j] - fd).max() < 1e-6

    def test_tangent_maps_are_symplectic_for_real_steps(self):
        state = kepler_init(0.6).astype(complex)
        omega = np.block(
            [[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]]
        )
        for tangent in (kepler_drift_tangent, kepler_kick_tangent):
            jac = tangent(0.3, state, np.eye(4, dtype=complex)).real
            assert np.abs(jac.T @ omega @ jac - omega).max() < 1e-14

    def test_system_wires_drift_as_flow_a(self):
        system = kepler_system()
        state = kepler_init(0.6).astype(complex)
        assert np.array_equal(system.flow_a(0.2, state), kepler_drift(0.2, state))
        assert np.array_equal(system.flow_b(0.2, state), kepler_kick(0.2, state))
        assert system.dimension == 4


def _naive_dft(values):
    n = values.size
    k = np.arange(n)
    matrix = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return matrix @ values


class TestTransform:
    def test_delta_spreads_to_ones(self):
        plan = dft_plan(8)
        delta = np.zeros(8, dtype=complex)
        delta[0] = 1.0
        assert np.abs(dft(plan, delta) - 1.0).max() < 1e-15

    def test_matches_naive_sum(self):
        rng = np.random.default_rng(11)
        plan = dft_plan(128)
        values = rng.standard_normal(128) + 1j * rng.standard_normal(128)
        got = dft(plan, values)
        want = _naive_dft(values)
        assert np.abs(got - want).max() < 1e-12

    def test_round_trip(self):
        rng = np.random.default_rng(12)
        plan = dft_plan(64)
        values = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        assert np.abs(idft(plan, dft(plan, values)) - values).max() < 1e-13

    def test_rejects_other_lengths(self):
        with pytest.raises(ValueError):
            dft_plan(6)

    def test_multiplier_layout(self):
        mult = spectral_multipliers(8)
        assert mult[0] == 0.0
        assert mult[1] == pytest.approx(-TWO_PI_SQ, rel=1e-15)
        assert mult[-1] == pytest.approx(-TWO_PI_SQ, rel=1e-15)
        # the unpaired frequency sits at the midpoint
        assert mult[4] == pytest.approx(-((np.pi * 8.0) ** 2), rel=1e-15)


class TestParabolicFlows:
    def test_potential_samples(self):
        x = grid_points(16)
        want = 8.0 + 4.0 * np.sin(2.0 * np.pi * x)
        assert np.abs(potential_samples(16) - want).max() < 1e-14

    def test_diffusion_decays_single_mode(self):
        grid = parabolic_grid(32)
        u = np.sin(2.0 * np.pi * grid_points(32)).astype(complex)
        system = parabolic_system(grid)
        out = system.flow_a(0.01, u)
        assert np.abs(out - np.exp(-TWO_PI_SQ * 0.01) * u).max() < 1e-12

    def test_diffusion_keeps_constants(self):
        grid = parabolic_grid(32)
        u = np.full(32, 2.5, dtype=complex)
        out = parabolic_system(grid).flow_a(0.3, u)
        assert np.abs(out - u).max() < 1e-13

    def test_reaction_multiplies_pointwise(self):
        grid = parabolic_grid(32)
        u = (1.0 + 0.5 * np.cos(2.0 * np.pi * grid_points(32))).astype(complex)
        h = 0.05
        out = parabolic_system(grid).flow_b(h, u)
        want = np.exp(h * grid.potential) * u
        assert np.abs(out - want).max() < 1e-13

    @pytest.mark.parametrize("flow_name", ["flow_a", "flow_b"])
    def test_semigroup_property(self, flow_name):
        grid = parabolic_grid(32)
        system = parabolic_system(grid)
        flow = getattr(system, flow_name)
        rng = np.random.default_rng(3)
        u = rng.standard_normal(32).astype(complex)
        h1, h2 = 0.013, 0.029
        assert np.abs(flow(h2, flow(h1, u)) - flow(h1 + h2, u)).max() < 1e-12

    def test_grid_level_flows_agree_with_system(self):
        grid = parabolic_grid(16)
        out_grid = parabolic_flow_a(0.02, grid)
        out_values = parabolic_system(grid).flow_a(0.02, grid.values)
        assert np.abs(out_grid.values - out_values).max() < 1e-15
        out_grid_b = parabolic_flow_b(0.02, grid)
        out_values_b = parabolic_system(grid).flow_b(0.02, grid.values)
        assert np.abs(out_grid_b.values - out_values_b).max() < 1e-15


class TestDenseReference:
    def test_time_zero_returns_initial_values(self):
        grid = parabolic_grid(64)
        assert np.abs(parabolic_reference(0.0, grid) - grid.values).max() < 1e-14

    def test_pure_diffusion_eigenmode(self):
        u0 = np.sin(2.0 * np.pi * grid_points(32))
        grid = parabolic_grid(32, values=u0, amplitude=0.0, offset=0.0)
        t = 0.05
        got = parabolic_reference(t, grid)
        assert np.abs(got - np.exp(-TWO_PI_SQ * t) * u0).max() < 1e-10

    def test_constant_potential_rescales_diffusion(self):
        u0 = np.sin(2.0 * np.pi * grid_points(32))
        grid = parabolic_grid(32, values=u0, amplitude=0.0, offset=8.0)
        t = 0.05
        got = parabolic_reference(t, grid)
        want = np.exp((8.0 - TWO_PI_SQ) * t) * u0
        assert np.abs(got - want).max() < 1e-9

    def test_reference_is_a_semigroup(self):
        grid = parabolic_grid(32)
        direct = parabolic_reference(0.08, grid)
        half = parabolic_reference(0.04, grid)
        again = parabolic_reference(
            0.04, parabolic_grid(32, values=half)
        )
        assert np.abs(direct - again).max() / np.abs(direct).max() < 1e-11

    def test_large_grids_are_refused(self):
        with pytest.raises(ValueError):
            parabolic_reference(0.1, parabolic_grid(1024))


class TestGridCsv:
    def test_columns_round_trip(self, tmp_path):
        grid = parabolic_grid(8)
        path = tmp_path / "grid.csv"
        write_grid_csv(str(path), grid)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,re_u,im_u"
        assert len(lines) == 9
        x, re_u, im_u = (float(f) for f in lines[2].split(","))
        assert x == pytest.approx(0.125)
        assert re_u == pytest.approx(np.sin(2.0 * np.pi * 0.125), abs=1e-15)
        assert im_u == 0.0
