"""Tests for the model parameters and the physical-variable systems."""

import numpy as np
import pytest
from pydantic import ValidationError

from models.equations import (
    ClosureViolatedError,
    NonPositiveDensityError,
    VacuumVolumeFractionError,
    bn_rhs,
    closure_gap,
    equilibrium_state,
    gamma_coeffs,
    kapila_rhs,
    kapila_state,
    mixture,
    phase_pressure_tendency,
    pressure,
)
from models.params import ModelParams
from models.state import PhaseState
from spectral.fields import Field, VectorField
from spectral.grid import GridSpec
from spectral.operators import advection, dealias, divergence


def uniform_state(grid, alpha, rho_plus, rho_minus, velocity=None):
    u = VectorField(tuple(Field.constant(grid, v) for v in (velocity or [0.0] * grid.dim)))
    return PhaseState(Field.constant(grid, alpha), Field.constant(grid, rho_plus),
                      Field.constant(grid, rho_minus), u)


class TestModelParams:
    """Constraint checks and derived constants."""

    def test_defaults_are_admissible(self, params):
        assert params.nu == pytest.approx(0.1)
        assert params.pressure_bar == pytest.approx(1.0)
        assert params.alpha_bar_minus == pytest.approx(0.5)
        assert params.mass_fraction_bar == pytest.approx(0.5)

    def test_lambda_alias(self):
        p = ModelParams.model_validate({"mu": 0.01, "lambda": 0.02})
        assert p.lam == pytest.approx(0.02)
        assert p.nu == pytest.approx(0.04)
        assert p.model_dump(by_alias=True)["lambda"] == pytest.approx(0.02)

    @pytest.mark.parametrize("overrides", [
        {"gamma_plus": 1.4, "gamma_minus": 1.5},
        {"gamma_minus": 0.9},
        {"mu": 0.4, "lam": 0.4},
        {"eta": 0.5},
        {"mu": 0.1, "lam": -0.2},
        {"A_plus": 2.0},
    ])
    def test_rejects_invalid(self, overrides):
        with pytest.raises(ValidationError):
            ModelParams(**overrides)

    def test_with_nu_rescales_lame_coefficients(self):
        p = ModelParams(mu=0.02, lam=0.06)
        q = p.with_nu(0.01)
        assert q.nu == pytest.approx(0.01)
        assert q.mu / q.lam == pytest.approx(p.mu / p.lam)
        assert q.gamma_plus == p.gamma_plus


class TestPressure:
    def test_pressure_law(self, grid1d, params):
        rho = Field.constant(grid1d, 1.1)
        assert pressure(rho, "+", params).mean() == pytest.approx(1.1 ** 2)
        assert pressure(rho, "-", params).mean() == pytest.approx(1.1 ** 1.5)

    def test_nonpositive_density(self, grid1d, params):
        with pytest.raises(NonPositiveDensityError):
            pressure(Field.constant(grid1d, -0.1), "+", params)

    def test_mixture(self, grid1d, params):
        state = uniform_state(grid1d, 0.25, 1.2, 0.9)
        rho, p_mix = mixture(state, params)
        assert rho.mean() == pytest.approx(0.25 * 1.2 + 0.75 * 0.9)
        assert p_mix.mean() == pytest.approx(0.25 * 1.2 ** 2 + 0.75 * 0.9 ** 1.5)


class TestBaerNunziato:
    """Tendencies of the relaxing system."""

    def test_equilibrium_is_stationary(self, grid2d, params):
        tendency = bn_rhs(equilibrium_state(grid2d, params), params)
        for f in (tendency.alpha_plus, tendency.rho_plus, tendency.rho_minus) + tuple(tendency.u):
            assert f.sup_norm() < 1e-12

    def test_uniform_velocity_is_damped(self, grid2d, params):
        state = uniform_state(grid2d, 0.5, 1.0, 1.0, velocity=[0.2, -0.1])
        tendency = bn_rhs(state, params)
        assert tendency.u[0].mean() == pytest.approx(-params.eta * 0.2)
        assert tendency.u[1].mean() == pytest.approx(params.eta * 0.1)

    def test_relaxation_moves_alpha_toward_higher_pressure_phase(self, grid1d, params):
        state = uniform_state(grid1d, 0.5, 1.01, 1.0)
        tendency = bn_rhs(state, params)
        gap = 1.01 ** 2 - 1.0
        assert tendency.alpha_plus.mean() == pytest.approx(0.25 * gap / params.nu)
        assert tendency.alpha_plus.min() > 0

    def test_vacuum_rejected(self, grid1d, params):
        state = uniform_state(grid1d, 0.0, 1.0, 1.0)
        with pytest.raises(VacuumVolumeFractionError):
            bn_rhs(state, params)

    def test_phase_pressure_tendency_relaxes_gap(self, grid1d, params):
        state = uniform_state(grid1d, 0.5, 1.01, 1.0)
        d_plus, d_minus = phase_pressure_tendency(state, params)
        gap = 1.01 ** 2 - 1.0
        expected_plus = -params.gamma_plus * 0.5 * 1.01 ** 2 * gap / params.nu
        expected_minus = params.gamma_minus * 0.5 * 1.0 * gap / params.nu
        assert d_plus.mean() == pytest.approx(expected_plus)
        assert d_minus.mean() == pytest.approx(expected_minus)
        # the gap shrinks
        assert d_plus.mean() - d_minus.mean() < 0

    def test_phase_pressure_tendency_matches_density_tendency(self, grid1d, params):
        state = uniform_state(grid1d, 0.4, 1.02, 0.99)
        tendency = bn_rhs(state, params)
        d_plus, _ = phase_pressure_tendency(state, params)
        chain = params.gamma_plus * 1.02 ** (params.gamma_plus - 1.0) * tendency.rho_plus.mean()
        assert d_plus.mean() == pytest.approx(chain, rel=1e-10)


class TestKapila:
    """Relaxed system in (alpha+, P, u)."""

    def test_state_from_pressure_is_closed(self, grid2d, params):
        alpha = Field.from_function(grid2d, lambda x, y: 0.5 + 0.01 * np.sin(x))
        p_field = Field.from_function(grid2d, lambda x, y: 1.0 + 0.01 * np.cos(y))
        state = kapila_state(alpha, p_field, VectorField.zeros(grid2d), params)
        assert closure_gap(state, params) < 1e-12

    def test_unclosed_state_rejected(self, grid1d, params):
        with pytest.raises(ClosureViolatedError):
            kapila_rhs(uniform_state(grid1d, 0.5, 1.01, 1.0), params)

    def test_divergence_free_flow_only_transports(self, grid2d, params):
        alpha = Field.from_function(grid2d, lambda x, y: 0.5 + 0.01 * np.cos(y))
        u = VectorField((Field.zeros(grid2d), Field.from_function(grid2d, lambda x, y: 0.1 * np.sin(x))))
        state = kapila_state(alpha, Field.constant(grid2d, 1.0), u, params)
        tendency = kapila_rhs(state, params)
        expected = dealias(-advection(u, alpha))
        np.testing.assert_allclose(tendency.alpha_plus.samples, expected.samples, atol=1e-12)
        assert tendency.pressure.sup_norm() < 1e-12


class TestGammaCoefficients:
    def test_values_at_equilibrium(self, grid1d, params):
        coeffs = gamma_coeffs(equilibrium_state(grid1d, params), params)
        d = 2.0 * 0.5 + 1.5 * 0.5
        assert coeffs.gamma1.mean() == pytest.approx(-0.25 / d)
        assert coeffs.gamma2.mean() == pytest.approx(1.0 / d)
        assert coeffs.gamma3.mean() == pytest.approx(3.0 / d)
        assert coeffs.gamma4.mean() == pytest.approx(0.5 / d)


def d_dx(values, h):
    """Fourth-order centered first derivative on a periodic 1D grid."""
    return (-np.roll(values, -2) + 8.0 * np.roll(values, -1) - 8.0 * np.roll(values, 1) + np.roll(values, 2)) / (12.0 * h)


def d2_dx2(values, h):
    return (-np.roll(values, -2) + 16.0 * np.roll(values, -1) - 30.0 * values
            + 16.0 * np.roll(values, 1) - np.roll(values, 2)) / (12.0 * h * h)


class TestFiniteDifferenceOracle:
    """Spectral tendencies against centered differences of the smooth equations."""

    @pytest.fixture
    def fine_grid(self):
        return GridSpec(dim=1, points_per_axis=4096)

    def test_bn_rhs(self, fine_grid, params):
        p, h = params, fine_grid.spacing
        x = fine_grid.coordinates()[0]
        alpha = 0.5 + 0.01 * np.sin(x)
        rho_plus = 1.0 + 0.01 * np.cos(x)
        rho_minus = 1.0 + 0.01 * np.sin(2.0 * x)
        u = 0.01 * np.cos(x)
        state = PhaseState(Field(fine_grid, alpha), Field(fine_grid, rho_plus), Field(fine_grid, rho_minus),
                           VectorField((Field(fine_grid, u),)))

        p_plus = p.A_plus * rho_plus ** p.gamma_plus
        p_minus = p.A_minus * rho_minus ** p.gamma_minus
        d_alpha = -u * d_dx(alpha, h) + alpha * (1.0 - alpha) * (p_plus - p_minus) / p.nu
        d_rho_plus = (-d_dx(alpha * rho_plus * u, h) - rho_plus * d_alpha) / alpha
        d_rho_minus = (-d_dx((1.0 - alpha) * rho_minus * u, h) + rho_minus * d_alpha) / (1.0 - alpha)
        rho = alpha * rho_plus + (1.0 - alpha) * rho_minus
        p_mix = alpha * p_plus + (1.0 - alpha) * p_minus
        # in 1D the Lame operator is (2 mu + lambda) d_xx = nu d_xx
        d_u = -u * d_dx(u, h) + (p.nu * d2_dx2(u, h) - d_dx(p_mix, h)) / rho - p.eta * u

        tendency = bn_rhs(state, p)
        for got, expected in ((tendency.alpha_plus, d_alpha), (tendency.rho_plus, d_rho_plus),
                              (tendency.rho_minus, d_rho_minus), (tendency.u[0], d_u)):
            np.testing.assert_allclose(got.samples, expected, atol=1e-9)

    def test_kapila_rhs(self, fine_grid, params):
        p, h = params, fine_grid.spacing
        x = fine_grid.coordinates()[0]
        alpha = 0.5 + 0.01 * np.sin(x)
        pressure_values = 1.0 + 0.01 * np.cos(x)
        u = 0.01 * np.sin(2.0 * x)
        state = kapila_state(Field(fine_grid, alpha), Field(fine_grid, pressure_values),
                             VectorField((Field(fine_grid, u),)), p)

        denominator = p.gamma_plus * (1.0 - alpha) + p.gamma_minus * alpha
        div_u = d_dx(u, h)
        d_alpha = -u * d_dx(alpha, h) - (p.gamma_plus - p.gamma_minus) * alpha * (1.0 - alpha) / denominator * div_u
        d_pressure = -u * d_dx(pressure_values, h) - p.gamma_plus * p.gamma_minus * pressure_values / denominator * div_u
        rho = (alpha * (pressure_values / p.A_plus) ** (1.0 / p.gamma_plus)
               + (1.0 - alpha) * (pressure_values / p.A_minus) ** (1.0 / p.gamma_minus))
        d_u = -u * d_dx(u, h) - d_dx(pressure_values, h) / rho - p.eta * u

        tendency = kapila_rhs(state, p)
        for got, expected in ((tendency.alpha_plus, d_alpha), (tendency.pressure, d_pressure),
                              (tendency.u[0], d_u)):
            np.testing.assert_allclose(got.samples, expected, atol=1e-9)

    def test_kapila_pressure_at_equilibrium(self, grid2d, params):
        p = params
        u = VectorField((Field.from_function(grid2d, lambda x, y: 0.01 * np.sin(x)),
                         Field.from_function(grid2d, lambda x, y: 0.01 * np.cos(2.0 * y))))
        state = kapila_state(Field.constant(grid2d, p.alpha_bar_plus), Field.constant(grid2d, p.pressure_bar), u, p)
        tendency = kapila_rhs(state, p)

        denominator = p.gamma_plus * p.alpha_bar_minus + p.gamma_minus * p.alpha_bar_plus
        div_u = divergence(u)
        expected_pressure = -p.gamma_plus * p.gamma_minus * p.pressure_bar / denominator * div_u
        expected_alpha = -(p.gamma_plus - p.gamma_minus) * p.alpha_bar_plus * p.alpha_bar_minus / denominator * div_u
        np.testing.assert_allclose(tendency.pressure.samples, expected_pressure.samples, atol=1e-14)
        np.testing.assert_allclose(tendency.alpha_plus.samples, expected_alpha.samples, atol=1e-14)
