"""Tests for grids, fields and spectral operators."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from spectral.fields import Field, GridMismatchError, SpectralError, VectorField
from spectral.grid import GridSpec
from spectral.operators import (
    advection,
    dealias,
    dealiased_product,
    divergence,
    gradient,
    lame_apply,
    lame_exponential,
    laplacian,
    partial,
)
from tests.conftest import random_band_field


class TestGridSpec:
    """Validation and cached tables of the periodic grid."""

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValidationError):
            GridSpec(dim=1, points_per_axis=48)

    def test_rejects_too_coarse(self):
        with pytest.raises(ValidationError):
            GridSpec(dim=1, points_per_axis=8)

    def test_basic_geometry(self):
        grid = GridSpec(dim=2, points_per_axis=32, length=4.0 * math.pi)
        assert grid.shape == (32, 32)
        assert grid.fundamental == pytest.approx(0.5)
        assert grid.volume == pytest.approx((4.0 * math.pi) ** 2)
        assert grid.dealias_cutoff == 10

    def test_derivative_wavenumbers_drop_nyquist(self, grid1d):
        k = grid1d.wavenumbers()[0]
        assert k[16] == 0.0
        assert grid1d.wavenumber_magnitude()[16] == pytest.approx(16.0)


class TestField:
    def test_l2_norm_on_torus(self, grid1d):
        f = Field.from_function(grid1d, np.sin)
        assert f.l2_norm() == pytest.approx(math.sqrt(math.pi), rel=1e-12)

    def test_samples_are_read_only(self, grid1d):
        f = Field.zeros(grid1d)
        with pytest.raises(ValueError):
            f.samples[0] = 1.0

    def test_shape_mismatch_rejected(self, grid1d):
        with pytest.raises(SpectralError):
            Field(grid1d, np.zeros(10))

    def test_grid_mismatch_rejected(self, grid1d):
        with pytest.raises(GridMismatchError):
            Field.zeros(grid1d) + Field.constant(GridSpec(dim=1, points_per_axis=64), 1.0)

    def test_numpy_scalars_on_the_left(self, grid1d):
        f = Field.constant(grid1d, 2.0)
        result = np.float64(3.0) * f
        assert isinstance(result, Field)
        assert result.max() == pytest.approx(6.0)

    def test_vector_field_requires_dim_components(self, grid2d):
        with pytest.raises(SpectralError):
            VectorField((Field.zeros(grid2d),))

    def test_parseval(self, grid2d, rng):
        f = Field(grid2d, rng.standard_normal(grid2d.shape))
        energy = float(np.sum(np.abs(f.spectrum) ** 2))
        assert f.l2_norm() ** 2 == pytest.approx(grid2d.volume * energy, rel=1e-12)
        assert float(np.mean(f.samples ** 2)) == pytest.approx(energy, rel=1e-12)


class TestDerivatives:
    """Spectral derivatives are exact on resolved modes."""

    def test_partial_of_sine(self, grid1d):
        f = Field.from_function(grid1d, lambda x: np.sin(3 * x))
        expected = 3 * np.cos(3 * grid1d.coordinates()[0])
        np.testing.assert_allclose(partial(f, 0).samples, expected, atol=1e-12)

    def test_nyquist_mode_has_zero_derivative(self, grid1d):
        f = Field.from_function(grid1d, lambda x: np.cos(16 * x))
        assert partial(f, 0).sup_norm() < 1e-12

    def test_div_grad_is_laplacian(self, grid2d, rng):
        f = random_band_field(grid2d, rng)
        np.testing.assert_allclose(divergence(gradient(f)).samples, laplacian(f).samples, atol=1e-10)

    def test_laplacian_eigenvalue(self, grid2d):
        f = Field.from_function(grid2d, lambda x, y: np.sin(2 * x) * np.cos(3 * y))
        np.testing.assert_allclose(laplacian(f).samples, -13.0 * f.samples, atol=1e-10)

    def test_advection_of_constant_is_zero(self, grid2d, rng):
        u = VectorField((random_band_field(grid2d, rng), random_band_field(grid2d, rng)))
        assert advection(u, Field.constant(grid2d, 3.0)).sup_norm() < 1e-12


class TestDealiasing:
    def test_two_thirds_cutoff(self, grid1d):
        kept = Field.from_function(grid1d, lambda x: np.cos(10 * x))
        dropped = Field.from_function(grid1d, lambda x: np.cos(11 * x))
        np.testing.assert_allclose(dealias(kept).samples, kept.samples, atol=1e-12)
        assert dealias(dropped).sup_norm() < 1e-12

    def test_product_of_resolved_modes_is_exact(self, grid1d):
        f = Field.from_function(grid1d, lambda x: np.sin(4 * x))
        expected = 0.5 * (1.0 - np.cos(8 * grid1d.coordinates()[0]))
        np.testing.assert_allclose(dealiased_product(f, f).samples, expected, atol=1e-12)

    def test_product_removes_aliases(self, grid1d):
        f = Field.from_function(grid1d, lambda x: np.cos(8 * x))
        g = Field.from_function(grid1d, lambda x: np.cos(9 * x))
        # cos 8x cos 9x = (cos x + cos 17x) / 2, and mode 17 folds onto 15
        expected = 0.5 * np.cos(grid1d.coordinates()[0])
        np.testing.assert_allclose(dealiased_product(f, g).samples, expected, atol=1e-12)


class TestLame:
    """Lame operator mu Lap u + (mu + lambda) grad div u."""

    def test_transverse_mode(self, grid2d):
        u = VectorField((Field.zeros(grid2d), Field.from_function(grid2d, lambda x, y: np.sin(x))))
        result = lame_apply(u, mu=0.3, lam_plus_mu=0.5)
        np.testing.assert_allclose(result[1].samples, -0.3 * u[1].samples, atol=1e-12)
        assert result[0].sup_norm() < 1e-12

    def test_longitudinal_mode(self, grid2d):
        u = VectorField((Field.from_function(grid2d, lambda x, y: np.sin(2 * x)), Field.zeros(grid2d)))
        result = lame_apply(u, mu=0.3, lam_plus_mu=0.5)
        np.testing.assert_allclose(result[0].samples, -4.0 * 0.8 * u[0].samples, atol=1e-12)

    def test_negative_coefficient_rejected(self, grid2d):
        with pytest.raises(SpectralError):
            lame_apply(VectorField.zeros(grid2d), mu=-1.0, lam_plus_mu=0.0)

    def test_linearity(self, grid2d, rng):
        u = VectorField(tuple(random_band_field(grid2d, rng) for _ in range(2)))
        v = VectorField(tuple(random_band_field(grid2d, rng) for _ in range(2)))
        combined = lame_apply(2.0 * u - 3.0 * v, mu=0.3, lam_plus_mu=0.5)
        separate = 2.0 * lame_apply(u, mu=0.3, lam_plus_mu=0.5) - 3.0 * lame_apply(v, mu=0.3, lam_plus_mu=0.5)
        scale = separate.sup_norm()
        assert (combined - separate).sup_norm() < 1e-12 * scale

    def test_exponential_matches_mode_decay(self, grid2d):
        transverse = Field.from_function(grid2d, lambda x, y: np.sin(x))
        longitudinal = Field.from_function(grid2d, lambda x, y: np.sin(2 * x))
        u = VectorField((longitudinal, transverse))
        result = lame_exponential(u, mu=0.3, lam_plus_mu=0.5, tau=0.7)
        np.testing.assert_allclose(result[1].samples, math.exp(-0.3 * 0.7) * transverse.samples, atol=1e-12)
        np.testing.assert_allclose(result[0].samples, math.exp(-0.8 * 4 * 0.7) * longitudinal.samples, atol=1e-12)
