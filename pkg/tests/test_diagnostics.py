"""Tests for the energy functionals and the relaxation-limit monitors."""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from diagnostics.energy import (
    DecayViolatedError,
    EnergyMonitor,
    EnergyTrace,
    EpsTooLargeError,
    NotBlockLocalizedError,
    decay_rate,
    eps_cap,
    equivalence_bounds,
    lyapunov_block,
    monitor_decay,
)
from diagnostics.linear import (
    LinearCoeffs,
    LinearState,
    epsilon_ell,
    epsilon_h,
    kappa,
    propagate_linear_exact,
)
from diagnostics.relaxation import (
    ConservationMonitor,
    DeltaRelationError,
    delta_quantities,
    pressure_gap_trace,
    relaxation_identity_residual,
)
from littlewood_paley.decomposition import decompose
from models.equations import closure_gap, equilibrium_state, phase_pressures
from reformulation.system import BarConstants, ReformState, to_reform_state
from services.initial_data import relaxed_initial_data
from spectral.fields import Field, VectorField
from spectral.grid import GridSpec
from timestepper.config import StepConfig
from timestepper.integrator import integrate

from tests.conftest import random_band_field, small_phase_state


def random_linear_state(grid, rng):
    fields = [random_band_field(grid, rng) for _ in range(2 + grid.dim)]
    return LinearState(fields[0], fields[1], VectorField(tuple(fields[2:])))


class TestConstants:
    def test_unit_coefficients(self):
        c = LinearCoeffs(nu=0.01)
        assert epsilon_ell(c) == pytest.approx(0.5 / 192.0)
        assert epsilon_h(c) == pytest.approx(epsilon_ell(c) / 16.0)
        assert kappa(c) == pytest.approx(0.5 / 192.0 / 256.0)
        assert c.c1 == c.c2 == 1.0

    def test_caps_admit_default_weights(self):
        c = LinearCoeffs(nu=0.01)
        assert epsilon_ell(c) <= eps_cap(0, c)
        assert epsilon_h(c) <= eps_cap(1, c)

    def test_from_model_uses_bar_constants(self, params):
        c = LinearCoeffs.from_model(params)
        bars = BarConstants.from_params(params)
        assert c.h1 == pytest.approx(bars.F1)
        assert c.h2 == pytest.approx(bars.F2)
        assert c.h6 == pytest.approx(0.5 * bars.F0)
        assert c.nu == pytest.approx(params.nu)

    def test_variable_part_bound(self, grid1d):
        with pytest.raises(ValueError):
            LinearCoeffs(h1=1.0, H1=Field.constant(grid1d, 0.6))

    def test_exact_propagator_rejects_variable_parts(self, grid1d, rng):
        c = LinearCoeffs(H2=Field.constant(grid1d, 0.1))
        with pytest.raises(ValueError):
            propagate_linear_exact(random_linear_state(grid1d, rng), c, 0.1)


class TestLyapunovBlock:
    @pytest.mark.parametrize("j", [-1, 0, 1, 2])
    def test_value_within_equivalence_bounds(self, grid2d, rng, j):
        c = LinearCoeffs(nu=0.01)
        state = random_linear_state(grid2d, rng)
        w_j = decompose(state.w).blocks[j]
        r_j = decompose(state.r).blocks[j]
        u_j = VectorField(tuple(decompose(comp).blocks[j] for comp in state.u))
        value = lyapunov_block(j, w_j, r_j, u_j, c, eps_cap(j, c))
        norm2 = w_j.l2_norm() ** 2 + r_j.l2_norm() ** 2 + u_j.l2_norm() ** 2
        lower, upper = equivalence_bounds(j, c)
        assert lower * norm2 <= value ** 2 <= upper * norm2

    def test_rejects_unlocalized_input(self, grid1d, rng):
        c = LinearCoeffs()
        state = random_linear_state(grid1d, rng)
        with pytest.raises(NotBlockLocalizedError):
            lyapunov_block(1, state.w, state.r, state.u, c, epsilon_h(c))

    def test_rejects_large_eps(self, grid1d):
        c = LinearCoeffs()
        zero = Field.zeros(grid1d)
        with pytest.raises(EpsTooLargeError):
            lyapunov_block(0, zero, zero, VectorField.zeros(grid1d), c, 1.0)


class TestEnergyMonitor:
    def _decay_trace(self, c, grid, rng, times):
        state = random_linear_state(grid, rng)
        monitor = EnergyMonitor(c)
        for t in times:
            monitor(t, propagate_linear_exact(state, c, t))
        return monitor.trace

    def test_linear_block_decay(self, rng):
        grid = GridSpec(dim=1, points_per_axis=256, length=16.0 * math.pi)
        c = LinearCoeffs(nu=1e-2)
        trace = self._decay_trace(c, grid, rng, np.linspace(0.0, 2.0, 21))

        assert set(range(-3, 5)) <= set(trace.values)
        assert trace.equivalence_violations == 0
        report = monitor_decay(trace, c)
        assert report.worst_slack <= 0.05
        for j in range(-3, 3):
            entry = report.per_j[j]
            assert entry["bound_rate"] == pytest.approx(decay_rate(j, trace))
            assert entry["empirical_rate"] >= entry["bound_rate"]

    def test_damped_integral_accumulates(self, grid1d, rng):
        trace = self._decay_trace(LinearCoeffs(nu=0.1), grid1d, rng, [0.0, 0.1, 0.2])
        assert trace.damped_w_integral[0] == 0.0
        assert trace.damped_w_integral[1] > 0.0
        assert trace.damped_w_integral[2] > trace.damped_w_integral[1]
        assert len(trace.rows()) == len(trace.values) * 3

    def test_growth_is_flagged(self):
        trace = EnergyTrace(times=[0.0, 1.0], values={0: [1.0, 1.2]}, kappa=1e-3, C2=1.0)
        with pytest.raises(DecayViolatedError):
            monitor_decay(trace, LinearCoeffs())

    def test_nonlinear_run_respects_equivalence(self, grid1d, params):
        monitor = EnergyMonitor(LinearCoeffs.from_model(params), params)
        integrate(small_phase_state(grid1d, params), params, StepConfig(dt=0.01, t_end=0.1, snapshot_every=2),
                  observers=[monitor])
        assert monitor.trace.equivalence_violations == 0
        assert len(monitor.trace.times) == 6

    def test_reform_states_are_read_directly(self, grid1d, params):
        monitor = EnergyMonitor(LinearCoeffs.from_model(params), params)
        monitor(0.0, ReformState.zeros(grid1d))
        assert all(values == [0.0] for values in monitor.trace.values.values())


class TestDeltaQuantities:
    def test_identical_relaxed_states(self, grid1d, params):
        state = relaxed_initial_data(small_phase_state(grid1d, params), params)
        delta = delta_quantities(state, state, params)
        for f in delta.primary() + (delta.delta_alpha_plus, delta.delta_P):
            assert f.sup_norm() < 1e-14

    def test_derived_differences_match_direct_subtraction(self, grid2d, params):
        relaxing = small_phase_state(grid2d, params)
        relaxed = relaxed_initial_data(small_phase_state(grid2d, params, amplitude=2e-2), params)
        delta = delta_quantities(relaxing, relaxed, params)
        assert delta.relation_residual < 1e-10
        direct = relaxing.alpha_plus - relaxed.alpha_plus
        assert (delta.delta_alpha_plus - direct).sup_norm() < 1e-10

    def test_phase_minus_difference(self, grid2d, params):
        relaxing = small_phase_state(grid2d, params)
        relaxed = relaxed_initial_data(small_phase_state(grid2d, params, amplitude=2e-2), params)
        delta = delta_quantities(relaxing, relaxed, params)
        _, pm_nu = phase_pressures(relaxing, params)
        _, pm = phase_pressures(relaxed, params)
        assert (delta.delta_P_minus - (pm_nu - pm)).sup_norm() < 1e-12
        assert (delta.delta_rho_minus - (relaxing.rho_minus - relaxed.rho_minus)).sup_norm() < 1e-12

    def test_unclosed_reference_is_rejected(self, grid2d, params):
        relaxing = small_phase_state(grid2d, params)
        unclosed = small_phase_state(grid2d, params, amplitude=2e-2)
        assert closure_gap(unclosed, params) > 1e-4
        with pytest.raises(DeltaRelationError):
            delta_quantities(relaxing, unclosed, params)


class TestPressureGap:
    def test_trace_and_running_integral(self, grid1d, params):
        start = small_phase_state(grid1d, params)
        trajectory = SimpleNamespace(times=[0.0, 0.1, 0.2],
                                     states=[start, start, equilibrium_state(grid1d, params)])
        trace = pressure_gap_trace(trajectory, params, [0.0, 0.5])
        norms = trace.norms[0.5]
        assert norms[0] > 0.0
        assert norms[2] == pytest.approx(0.0, abs=1e-14)
        assert trace.integrals[0.5][1] == pytest.approx(0.1 * norms[0] / params.nu)
        assert trace.sup(0.5) == norms[0]
        assert len(trace.rows()) == 6

    def test_relaxation_identity_along_run(self, grid1d, params):
        trajectory = integrate(small_phase_state(grid1d, params), params,
                               StepConfig(dt=1e-3, t_end=0.02, snapshot_every=1))
        assert relaxation_identity_residual(trajectory, params) < 1e-2

    def test_identity_needs_three_snapshots(self, grid1d, params):
        trajectory = SimpleNamespace(times=[0.0, 0.1], states=[equilibrium_state(grid1d, params)] * 2)
        with pytest.raises(ValueError):
            relaxation_identity_residual(trajectory, params)


class TestConservationMonitor:
    def test_records_phase_masses(self, grid1d, params):
        monitor = ConservationMonitor()
        state = equilibrium_state(grid1d, params)
        monitor(0.0, state)
        monitor(0.5, state)
        assert monitor.mass_plus == [pytest.approx(0.5), pytest.approx(0.5)]
        assert monitor.drift() == {"mass_plus": 0.0, "mass_minus": 0.0}
        assert monitor.rows()[1][0] == 0.5

    def test_rejects_reformulated_states(self, grid1d, params):
        with pytest.raises(TypeError):
            ConservationMonitor()(0.0, to_reform_state(equilibrium_state(grid1d, params), params))
