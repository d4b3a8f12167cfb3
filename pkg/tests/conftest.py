"""Shared fixtures for the test suite."""

import logging
import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from models.params import ModelParams  # noqa: E402
from spectral.fields import Field, VectorField  # noqa: E402
from spectral.grid import GridSpec  # noqa: E402
from utils.logging_utils import HANDLER_NAME  # noqa: E402


@pytest.fixture(autouse=True)
def lab_log_handlers():
    """Drop handlers installed by setup_logging; they hold the captured stderr of one test."""
    yield
    root = logging.getLogger()
    for handler in [h for h in root.handlers if h.get_name() == HANDLER_NAME]:
        root.removeHandler(handler)
        handler.close()


@pytest.fixture
def grid1d():
    return GridSpec(dim=1, points_per_axis=32)


@pytest.fixture
def grid2d():
    return GridSpec(dim=2, points_per_axis=32)


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_band_field(grid: GridSpec, rng: np.random.Generator, k_max: int = None) -> Field:
    """Random real field whose spectrum lies inside the dealiased band."""
    spectrum = np.fft.fftn(rng.standard_normal(grid.shape), norm="forward")
    mask = grid.dealias_mask().copy()
    if k_max is not None:
        mask &= grid.wavenumber_magnitude() / grid.fundamental <= k_max
    return Field.from_spectrum(grid, np.where(mask, spectrum, 0.0))


def small_phase_state(grid: GridSpec, p: ModelParams, amplitude: float = 1e-2, well_prepared: bool = False):
    """Smooth deterministic perturbation of the equilibrium."""
    from models.state import PhaseState

    x = grid.coordinates()[0]
    y = grid.coordinates()[-1]
    alpha = Field(grid, p.alpha_bar_plus + amplitude * np.sin(x))
    rho_plus = Field(grid, p.rho_bar_plus * (1.0 + amplitude * np.cos(y)))
    if well_prepared:
        pressure = p.A_plus * rho_plus.samples ** p.gamma_plus
        rho_minus = Field(grid, (pressure / p.A_minus) ** (1.0 / p.gamma_minus))
    else:
        rho_minus = Field(grid, p.rho_bar_minus * (1.0 + amplitude * np.sin(x + 2.0 * y)))
    u = VectorField(tuple(
        Field(grid, amplitude * np.cos(x + (k + 1) * y)) for k in range(grid.dim)
    ))
    return PhaseState(alpha, rho_plus, rho_minus, u)


@pytest.fixture
def phase_state_2d(grid2d, params):
    return small_phase_state(grid2d, params)


@pytest.fixture
def run_config_data(tmp_path):
    """Small, fast run configuration as a JSON-ready dict."""
    return {
        "grid": {"dim": 1, "points_per_axis": 32, "length": 2.0 * math.pi},
        "step": {"dt": 0.01, "t_end": 0.1, "snapshot_every": 2},
        "initial_data": {"seed": 7, "amplitude": 0.01, "band": [1, 3], "well_prepared": True},
        "output_dir": str(tmp_path / "run"),
        "rate_study": {"nu_values": [0.1, 0.03, 0.01], "workers": 1, "snapshot_every": 2},
        "reform_check": {"n_points": 500},
    }
