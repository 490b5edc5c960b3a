"""Residual blocks, analytic Jacobian, strength derivative, flat closed form."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexwave.errors import DegenerateStrip, VortexTooClose
from vortexwave.layers import flat_dno_symbol, flat_interior_dy_symbol
from vortexwave.spectral import EvenField
from vortexwave.system import PhysicalParameters, WaveState, WaveSystem
from vortexwave.vortex import VortexPair, vortex_traces

PARAMS = PhysicalParameters()


def decayed_state(rng, n_modes, eta_scale=0.02, trace_scale=0.05, speed=0.05):
    n = n_modes + 1
    decay = np.exp(-0.4 * np.arange(n))
    eta = eta_scale * rng.standard_normal(n) * decay
    eta[0] = 0.0
    return WaveState(
        EvenField(eta),
        EvenField(trace_scale * rng.standard_normal(n) * decay),
        EvenField(trace_scale * rng.standard_normal(n) * decay),
        speed,
    )


def mode_state(n_modes, which, k, amplitude):
    coeffs = {name: np.zeros(n_modes + 1) for name in ("eta", "up", "low")}
    coeffs[which][k] = amplitude
    return WaveState(
        EvenField(coeffs["eta"]), EvenField(coeffs["up"]),
        EvenField(coeffs["low"]), 0.0,
    )


class TestParameters:
    def test_defaults_are_stably_stratified(self):
        assert PARAMS.buoyancy == pytest.approx(-0.1)
        assert PARAMS.buoyancy < 0

    def test_density_ordering_enforced(self):
        with pytest.raises(ValueError, match="upper density"):
            PhysicalParameters(rho_lower=1.0, rho_upper=1.2)

    def test_vortex_outside_lower_layer_rejected(self):
        with pytest.raises(ValueError, match="lower layer"):
            PhysicalParameters(pair=VortexPair((0.0, -1.5), (0.0, 0.5)))

    def test_nonpositive_tension_rejected(self):
        with pytest.raises(ValueError):
            PhysicalParameters(surface_tension=0.0)


class TestStateVector:
    def test_round_trip(self):
        rng = np.random.default_rng(0)
        state = decayed_state(rng, 8)
        back = WaveState.from_vector(state.to_vector(), 8)
        assert np.array_equal(back.to_vector(), state.to_vector())

    def test_zero_state(self):
        z = WaveState.zero(6)
        assert np.all(z.to_vector() == 0.0)
        assert z.to_vector().size == 3 * 7 + 1

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError, match="band"):
            WaveState.from_vector(np.zeros(10), 8)


class TestResidual:
    def test_origin_is_trivial_solution(self):
        system = WaveSystem(PARAMS, 16, 12)
        res = system.residual(system.origin(), 0.0)
        assert all(b == 0.0 for b in res.block_norms())

    def test_bernoulli_constant_shifts_dynamic_block(self):
        params = PhysicalParameters(bernoulli_constant=0.25)
        system = WaveSystem(params, 16, 12)
        res = system.residual(system.origin(), 0.0)
        assert res.dynamic.coeffs[0] == pytest.approx(-0.25)
        assert np.abs(res.dynamic.coeffs[1:]).max() < 1e-14

    def test_speed_only_state_leaves_drift(self):
        system = WaveSystem(PARAMS, 16, 12)
        state = WaveState.from_vector(
            np.r_[np.zeros(3 * 17), 0.3], 16
        )
        res = system.residual(state, 0.0)
        assert res.drift == pytest.approx(0.3, abs=1e-14)
        assert res.block_norms()[0] == 0.0
        assert res.block_norms()[1] == 0.0

    def test_flat_lower_trace_matches_hand_assembly(self):
        system = WaveSystem(PARAMS, 64, 32)
        amplitude = 0.3
        state = mode_state(64, "low", 1, amplitude)
        res = system.residual(state, 0.0)
        g = system.grid
        kappa = g.wavenumbers[1]
        profile = amplitude * np.cos(kappa * g.half_nodes)
        normal = flat_dno_symbol(g, PARAMS.depth)[1] * profile
        tangential = -amplitude * kappa * np.sin(kappa * g.half_nodes)
        oracle = -0.5 * PARAMS.rho_lower * (normal**2 + tangential**2)
        got = g.even_values_half(res.dynamic)
        assert np.abs(got - oracle).max() < 1e-9

    def test_flat_two_layer_hand_assembly(self):
        system = WaveSystem(PARAMS, 32, 24)
        g = system.grid
        n = 33
        up = np.zeros(n)
        low = np.zeros(n)
        up[2], low[3] = 0.2, -0.15
        state = WaveState(EvenField(np.zeros(n)), EvenField(up),
                          EvenField(low), 0.4)
        res = system.residual(state, 0.0)
        sym = flat_dno_symbol(g, PARAMS.depth)
        x = g.half_nodes
        gu = sym[2] * up[2] * np.cos(g.wavenumbers[2] * x)
        bu = -up[2] * g.wavenumbers[2] * np.sin(g.wavenumbers[2] * x)
        gl = sym[3] * low[3] * np.cos(g.wavenumbers[3] * x)
        bl = -low[3] * g.wavenumbers[3] * np.sin(g.wavenumbers[3] * x)
        oracle = (
            state.speed * (PARAMS.rho_upper * gu - PARAMS.rho_lower * gl)
            + 0.5 * PARAMS.rho_upper * (gu**2 + bu**2)
            - 0.5 * PARAMS.rho_lower * (gl**2 + bl**2)
        )
        got = g.even_values_half(res.dynamic)
        assert np.abs(got - oracle).max() < 1e-10

    def test_drift_block_closed_form(self):
        system = WaveSystem(PARAMS, 16, 32)
        amplitude = 0.7
        state = WaveState.from_vector(
            np.r_[np.zeros(17), np.zeros(17),
                  amplitude * (np.arange(17) == 2), 0.1], 16
        )
        res = system.residual(state, 0.02)
        sym = flat_interior_dy_symbol(system.grid, PARAMS.depth,
                                      PARAMS.pair.lower[1])
        expected = 0.1 + amplitude * sym[2] - system.pair_speed * 0.02
        assert res.drift == pytest.approx(expected, abs=1e-9)

    def test_kinematic_block_matches_direct_assembly(self):
        rng = np.random.default_rng(3)
        system = WaveSystem(PARAMS, 16, 12)
        state = decayed_state(rng, 16, speed=0.2)
        strength = 0.04
        res = system.residual(state, strength)
        g = system.grid
        e = g.even_values_half(state.elevation)
        tr = vortex_traces(PARAMS.pair, g.half_nodes, e, PARAMS.kernel,
                           PARAMS.half_period)
        direct = (g.even_values_half(state.trace_upper)
                  + strength * tr.phi_bar + state.speed * e)
        got = g.even_values_half(res.kinematic_upper)
        assert np.abs(got - direct).max() < 1e-13

    def test_kinematic_block_agrees_with_full_grid_assembly(self):
        rng = np.random.default_rng(4)
        system = WaveSystem(PARAMS, 16, 12)
        state = decayed_state(rng, 16, speed=0.1)
        strength = 0.03
        res = system.residual(state, strength)
        g = system.grid
        x = g.nodes
        e = g.evaluate_even(state.elevation, x)
        tr = vortex_traces(PARAMS.pair, x, e, PARAMS.kernel,
                           PARAMS.half_period)
        full = (g.evaluate_even(state.trace_lower, x)
                + strength * tr.phi + state.speed * e)
        refolded = g.to_even(full)
        assert np.abs(refolded.coeffs - res.kinematic_lower.coeffs).max() < 1e-12

    def test_rerun_is_bitwise_identical(self):
        rng = np.random.default_rng(5)
        system = WaveSystem(PARAMS, 16, 12)
        state = decayed_state(rng, 16)
        first = system.residual(state, 0.02).to_vector()
        second = system.residual(state, 0.02).to_vector()
        assert np.array_equal(first, second)

    def test_degenerate_strip_propagates(self):
        system = WaveSystem(PARAMS, 16, 12)
        state = mode_state(16, "eta", 0, 0.999 * PARAMS.depth)
        with pytest.raises(DegenerateStrip):
            system.residual(state, 0.0)

    def test_vortex_guard_propagates(self):
        system = WaveSystem(PARAMS, 16, 12, vortex_guard=0.6)
        with pytest.raises(VortexTooClose):
            system.residual(system.origin(), 0.0)

    @settings(max_examples=10, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), speed=st.floats(-0.2, 0.2))
    def test_speed_enters_kinematics_linearly(self, seed, speed):
        rng = np.random.default_rng(seed)
        system = WaveSystem(PARAMS, 8, 8)
        base = decayed_state(rng, 8, speed=0.0)
        moved = WaveState(base.elevation, base.trace_upper,
                          base.trace_lower, speed)
        r0 = system.residual(base, 0.0)
        r1 = system.residual(moved, 0.0)
        shift = r1.kinematic_lower.coeffs - r0.kinematic_lower.coeffs
        assert np.abs(shift - speed * base.elevation.coeffs).max() < 1e-13


class TestJacobian:
    def test_origin_matches_closed_form(self):
        system = WaveSystem(PARAMS, 32, 48)
        analytic = system.jacobian(system.origin(), 0.0)
        flat = system.flat_linearization()
        assert np.abs(analytic - flat).max() < 1e-10

    def test_eta_block_multiplier_value(self):
        system = WaveSystem(PARAMS, 16, 12)
        flat = system.flat_linearization()
        assert flat[2, 2] == pytest.approx(-0.5)

    def test_origin_is_invertible(self):
        system = WaveSystem(PARAMS, 16, 12)
        singulars = np.linalg.svd(system.flat_linearization(),
                                  compute_uv=False)
        assert singulars[-1] > 1e-6

    def test_fd_referee_on_random_states(self):
        rng = np.random.default_rng(11)
        system = WaveSystem(PARAMS, 16, 12)
        for _ in range(2):
            state = decayed_state(rng, 16, speed=0.1 * rng.standard_normal())
            strength = 0.05 * rng.standard_normal()
            analytic = system.jacobian(state, strength)
            fd = system.jacobian(state, strength, mode="fd")
            rel = np.linalg.norm(analytic - fd) / np.linalg.norm(fd)
            assert rel < 1e-7

    def test_fd_referee_at_reference_amplitudes(self):
        rng = np.random.default_rng(12)
        system = WaveSystem(PARAMS, 16, 12)
        state = decayed_state(rng, 16, eta_scale=0.05, speed=0.1)
        peak = np.abs(system.grid.even_values_half(state.elevation)).max()
        scaled = WaveState(
            EvenField(state.elevation.coeffs * (0.05 * PARAMS.depth / peak)),
            state.trace_upper, state.trace_lower, state.speed,
        )
        analytic = system.jacobian(scaled, 0.05)
        fd = system.jacobian(scaled, 0.05, mode="fd")
        rel = np.linalg.norm(analytic - fd) / np.linalg.norm(fd)
        assert rel < 1e-7

    def test_unknown_mode_rejected(self):
        system = WaveSystem(PARAMS, 8, 8)
        with pytest.raises(ValueError, match="mode"):
            system.jacobian(system.origin(), 0.0, mode="forward")


class TestStrengthDerivative:
    def test_matches_central_difference(self):
        rng = np.random.default_rng(21)
        system = WaveSystem(PARAMS, 16, 12)
        state = decayed_state(rng, 16, speed=0.15)
        prep = system.prepare(state)
        analytic = system.strength_derivative(prep, 0.03).to_vector()
        fd = system.strength_derivative_fd(state, 0.03)
        assert np.abs(analytic - fd).max() < 1e-9

    def test_origin_blocks(self):
        system = WaveSystem(PARAMS, 16, 12)
        prep = system.prepare(system.origin())
        der = system.strength_derivative(prep, 0.0)
        assert np.all(der.dynamic.coeffs == 0.0)
        assert der.drift == pytest.approx(-system.pair_speed)
        g = system.grid
        tr = vortex_traces(PARAMS.pair, g.half_nodes,
                           np.zeros(g.n_modes + 1), PARAMS.kernel,
                           PARAMS.half_period)
        got = g.even_values_half(der.kinematic_lower)
        assert np.abs(got - tr.phi).max() < 1e-13


class TestDiagnostics:
    def test_vertical_equilibrium_vanishes_on_axis(self):
        rng = np.random.default_rng(31)
        system = WaveSystem(PARAMS, 16, 12)
        state = decayed_state(rng, 16, speed=0.1)
        prep = system.prepare(state)
        assert abs(system.vertical_equilibrium(prep, 0.03)) < 1e-10

    def test_band_limited_state_keeps_dynamic_resolved(self):
        rng = np.random.default_rng(32)
        n_modes = 32
        system = WaveSystem(PARAMS, n_modes, 16)
        state = decayed_state(rng, n_modes, eta_scale=0.002,
                              trace_scale=0.005)
        cut = n_modes // 2
        limited = WaveState(
            EvenField(np.where(np.arange(n_modes + 1) <= cut,
                               state.elevation.coeffs, 0.0)),
            EvenField(np.where(np.arange(n_modes + 1) <= cut,
                               state.trace_upper.coeffs, 0.0)),
            EvenField(np.where(np.arange(n_modes + 1) <= cut,
                               state.trace_lower.coeffs, 0.0)),
            0.1,
        )
        res = system.residual(limited, 0.02)
        coeffs = res.dynamic.coeffs
        total = np.sum(coeffs**2)
        top = np.sum(coeffs[2 * (n_modes + 1) // 3:] ** 2)
        assert top < 1e-8 * total
