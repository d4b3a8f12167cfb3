"""Tests for the dyadic decomposition and Besov norms."""

import math

import numpy as np
import pytest

from littlewood_paley.bump import DEFAULT_BUMP, INNER_RADIUS, OUTER_RADIUS
from littlewood_paley.decomposition import (
    GridTooCoarseError,
    block_range,
    decompose,
    is_block_localized,
    low_high_split,
    low_pass,
)
from littlewood_paley.norms import EmptyHistoryError, bernstein_check, besov_norm, chemin_lerner_norm
from spectral.fields import Field
from spectral.grid import GridSpec
from tests.conftest import random_band_field


class TestBump:
    """Radial profiles chi and phi."""

    def test_chi_plateau_and_support(self):
        radius = np.array([0.0, 0.5, 5.0 / 6.0, 1.3, 2.0])
        values = DEFAULT_BUMP.chi(radius)
        assert values[0] == pytest.approx(1.0)
        assert values[2] == pytest.approx(1.0)
        assert values[3] == pytest.approx(0.0)
        assert values[4] == pytest.approx(0.0)

    def test_phi_support_is_annulus(self):
        radius = np.linspace(0.0, 4.0, 4001)
        values = DEFAULT_BUMP.phi(radius)
        outside = (radius < INNER_RADIUS) | (radius > OUTER_RADIUS)
        assert np.all(np.abs(values[outside]) < 1e-14)
        assert np.all(values >= -1e-14)

    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_partition_of_unity(self, dim):
        grid = GridSpec(dim=dim, points_per_axis=16 if dim == 3 else 64)
        j_min, j_max = block_range(grid)
        assert DEFAULT_BUMP.partition_residual(grid.wavenumber_magnitude(), j_min, j_max) < 1e-10


class TestDecomposition:
    def test_block_range_default_torus(self):
        assert block_range(GridSpec(dim=1, points_per_axis=32)) == (-1, 4)

    def test_block_range_large_torus(self):
        grid = GridSpec(dim=1, points_per_axis=256, length=16.0 * math.pi)
        j_min, j_max = block_range(grid)
        assert j_min == -4
        assert j_max == 4

    def test_too_coarse_grid(self):
        coarse = GridSpec.model_construct(dim=1, points_per_axis=4, length=2.0 * math.pi)
        with pytest.raises(GridTooCoarseError):
            decompose(Field(coarse, np.zeros(4)))

    def test_reconstruction(self, grid2d, rng):
        f = random_band_field(grid2d, rng) + 0.7
        restored = decompose(f).reconstruct()
        assert (restored - f).sup_norm() < 1e-10

    def test_reconstruction_includes_undealiased_modes(self, grid2d, rng):
        f = Field(grid2d, rng.standard_normal(grid2d.shape))
        assert (decompose(f).reconstruct() - f).sup_norm() < 1e-10

    def test_single_mode_is_block_localized(self, grid1d):
        f = Field.from_function(grid1d, lambda x: np.cos(3 * x))
        assert is_block_localized(f, 1)
        assert not is_block_localized(f, 3)

    def test_blocks_are_localized(self, grid2d, rng):
        f = random_band_field(grid2d, rng)
        blocks = decompose(f).blocks
        for j, block in blocks.items():
            if block.l2_norm() > 1e-8 * f.l2_norm():
                assert is_block_localized(block, j)

    def test_low_high_split_sums_to_field(self, grid2d, rng):
        f = random_band_field(grid2d, rng) + 2.0
        low, high = low_high_split(f)
        assert (low + high - f).sup_norm() < 1e-12
        assert low.mean() == pytest.approx(f.mean())
        assert abs(high.mean()) < 1e-12

    def test_low_pass_keeps_low_modes(self, grid1d):
        slow = Field.from_function(grid1d, lambda x: np.sin(x))
        fast = Field.from_function(grid1d, lambda x: np.sin(9 * x))
        filtered = low_pass(slow + fast, 0)
        assert (filtered - slow).sup_norm() < 1e-12


class TestBesovNorm:
    """Weighted l1 sums of block norms."""

    @pytest.mark.parametrize("k", [1, 3, 7])
    def test_single_mode_b0_equals_l2(self, grid1d, k):
        f = Field.from_function(grid1d, lambda x: np.cos(k * x))
        assert besov_norm(f, 0.0).total == pytest.approx(f.l2_norm(), rel=1e-10)

    def test_mean_is_invisible(self, grid1d):
        f = Field.from_function(grid1d, lambda x: np.sin(2 * x))
        assert besov_norm(f + 5.0, 0.5).total == pytest.approx(besov_norm(f, 0.5).total, rel=1e-12)

    def test_low_and_high_parts(self, grid1d):
        f = Field.from_function(grid1d, lambda x: np.sin(x) + np.sin(8 * x))
        report = besov_norm(f, 1.0)
        assert report.low == pytest.approx(sum(v for j, v in report.per_j.items() if j <= 0))
        assert report.high == pytest.approx(sum(v for j, v in report.per_j.items() if j >= -1))
        assert report.rows()[0][0] == report.j_min

    def test_scaling_with_regularity(self, grid1d):
        # |xi| = 3 sits only in block j = 1, where phi equals 1
        f = Field.from_function(grid1d, lambda x: np.cos(3 * x))
        assert besov_norm(f, 1.0).total == pytest.approx(2.0 * f.l2_norm(), rel=1e-10)

    def test_bernstein_on_seeded_fields(self, grid2d):
        rng = np.random.default_rng(0)
        for _ in range(100):
            f = Field(grid2d, rng.standard_normal(grid2d.shape))
            assert all(bernstein_check(f).values())


class TestCheminLerner:
    def test_constant_history(self, grid1d):
        f = Field.from_function(grid1d, lambda x: np.cos(3 * x))
        history = [f] * 5
        total = besov_norm(f, 0.5).total
        assert chemin_lerner_norm(history, 0.5, "inf", 0.1) == pytest.approx(total)
        assert chemin_lerner_norm(history, 0.5, 1, 0.1) == pytest.approx(0.4 * total)
        assert chemin_lerner_norm(history, 0.5, 2, 0.1) == pytest.approx(math.sqrt(0.4) * total)

    def test_exponential_decay(self, grid1d):
        f = Field.from_function(grid1d, lambda x: np.cos(3 * x))
        h = 1e-3
        times = np.arange(1001) * h
        history = [math.exp(-t) * f for t in times]
        total = besov_norm(f, 0.5).total
        assert chemin_lerner_norm(history, 0.5, 1, h) == pytest.approx((1.0 - math.exp(-1.0)) * total, rel=1e-3)
        assert chemin_lerner_norm(history, 0.5, 2, h) == pytest.approx(
            math.sqrt(0.5 * (1.0 - math.exp(-2.0))) * total, rel=2e-3)
        assert chemin_lerner_norm(history, 0.5, "inf", h) == pytest.approx(total)

    def test_uneven_sample_times(self, grid1d):
        f = Field.from_function(grid1d, lambda x: np.cos(3 * x))
        total = besov_norm(f, 0.0).total
        history = [f, 2.0 * f, 3.0 * f]
        value = chemin_lerner_norm(history, 0.0, 1, times=[0.0, 0.4, 0.5])
        assert value == pytest.approx((0.4 * 1.0 + 0.1 * 2.0) * total)

    def test_dt_and_times_are_exclusive(self, grid1d):
        history = [Field.zeros(grid1d)] * 3
        with pytest.raises(ValueError):
            chemin_lerner_norm(history, 0.0, 1, 0.1, times=[0.0, 0.1, 0.2])
        with pytest.raises(ValueError):
            chemin_lerner_norm(history, 0.0, 1)
        with pytest.raises(ValueError):
            chemin_lerner_norm(history, 0.0, 1, times=[0.0, 0.1])

    def test_needs_two_samples(self, grid1d):
        with pytest.raises(EmptyHistoryError):
            chemin_lerner_norm([Field.zeros(grid1d)], 0.0, 1, 0.1)
