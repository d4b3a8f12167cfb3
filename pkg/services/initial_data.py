"""
Seeded initial data near the constant equilibrium.
"""

import logging
import math

import numpy as np

from littlewood_paley.decomposition import low_pass
from models.equations import density_from_pressure, kapila_state, mixture, phase_pressure_values
from models.params import ModelParams
from models.state import PhaseState
from reformulation.system import to_reform_state
from services.run_config import ConfigInvalidError, InitialDataConfig, RunConfig
from spectral.fields import Field, VectorField, forward_transform, inverse_transform
from spectral.grid import GridSpec

logger = logging.getLogger(__name__)


def band_limited_field(grid: GridSpec, rng: np.random.Generator, band) -> Field:
    """
    Real random field with spectrum on k_lo <= |n| <= k_hi, sup norm 1.

    Args:
        grid: Grid specification
        rng: Random generator consumed in a fixed order
        band: (k_lo, k_hi) in integer mode units

    Returns:
        Field with zero mean and max |f| = 1 (zero if the band is empty)
    """
    k_lo, k_hi = band
    modes = grid.wavenumber_magnitude() / grid.fundamental
    keep = (modes >= k_lo - 1e-9) & (modes <= k_hi + 1e-9) & grid.dealias_mask()
    noise = rng.standard_normal(grid.shape)
    samples = inverse_transform(np.where(keep, forward_transform(noise), 0.0))
    peak = float(np.max(np.abs(samples)))
    if peak == 0.0:
        return Field.zeros(grid)
    return Field(grid, samples / peak)


def _perturbations(grid: GridSpec, init: InitialDataConfig):
    rng = np.random.default_rng(init.seed)
    count = 3 + grid.dim
    shapes = [band_limited_field(grid, rng, init.band) for _ in range(count)]
    if init.low_pass_j is not None:
        shapes = [low_pass(f, init.low_pass_j) for f in shapes]
    return shapes


def make_initial_data(cfg: RunConfig) -> PhaseState:
    """
    Equilibrium plus seeded band-limited perturbations of (alpha+, rho+, rho-, u).

    With well_prepared, rho- is re-solved pointwise so that P- = P+.

    Args:
        cfg: Validated run configuration

    Returns:
        PhaseState

    Raises:
        ConfigInvalidError: If the perturbed state leaves the admissible set
    """
    grid, p, init = cfg.grid, cfg.model, cfg.initial_data
    amp = init.amplitude
    shapes = _perturbations(grid, init)

    alpha = p.alpha_bar_plus + amp * shapes[0]
    rho_plus = p.rho_bar_plus * (1.0 + amp * shapes[1])
    rho_minus = p.rho_bar_minus * (1.0 + amp * shapes[2])
    u = VectorField(tuple(amp * f for f in shapes[3:]))

    if alpha.min() <= 0.0 or alpha.max() >= 1.0 or rho_plus.min() <= 0.0 or rho_minus.min() <= 0.0:
        raise ConfigInvalidError(f"amplitude {amp} produces a non-admissible initial state")
    if init.well_prepared:
        p_plus = phase_pressure_values(rho_plus.samples, "+", p)
        rho_minus = Field(grid, density_from_pressure(p_plus, "-", p))

    logger.info(f"Initial data: seed={init.seed}, amplitude={amp}, band={list(init.band)}, "
                f"well_prepared={init.well_prepared}")
    return PhaseState(alpha_plus=alpha, rho_plus=rho_plus, rho_minus=rho_minus, u=u)


def relaxed_initial_data(state: PhaseState, p: ModelParams) -> PhaseState:
    """Relaxed state sharing alpha+ and u, at the mixture pressure of the given state."""
    _, mixture_pressure = mixture(state, p)
    return kapila_state(state.alpha_plus, mixture_pressure, state.u, p)


def initial_state_for(cfg: RunConfig):
    """Initial state in the unknowns of cfg.system."""
    state = make_initial_data(cfg)
    if cfg.system == "kapila":
        return relaxed_initial_data(state, cfg.model)
    if cfg.system == "reform":
        return to_reform_state(state, cfg.model)
    return state


def ill_prepared_initial_data(relaxed: PhaseState, cfg: RunConfig, nu: float) -> PhaseState:
    """
    Relaxed data pushed off the closure by a discrepancy of order sqrt(nu).

    Both phase densities are scaled by 1 + c sqrt(nu) g, with c =
    rate_study.discrepancy and g a seeded band-limited shape of sup norm 1.
    alpha+, u and the mass fraction are unchanged; the pressure gap and the
    difference in P+ - Gamma2 (P+ - P-) are of order c sqrt(nu).

    Args:
        relaxed: Relaxed state (P+ = P-)
        cfg: Run configuration supplying the seed, band and c
        nu: Relaxation time of the run

    Returns:
        PhaseState (the relaxed state itself when c = 0)

    Raises:
        ConfigInvalidError: If the scaled densities lose positivity
    """
    coefficient = cfg.rate_study.discrepancy
    if coefficient == 0.0:
        return relaxed
    init = cfg.initial_data
    shape = band_limited_field(relaxed.grid, np.random.default_rng([init.seed, 1]), init.band)
    if init.low_pass_j is not None:
        shape = low_pass(shape, init.low_pass_j)
    factor = 1.0 + coefficient * math.sqrt(nu) * shape
    if factor.min() <= 0.0:
        raise ConfigInvalidError(f"discrepancy {coefficient} at nu = {nu} makes a density nonpositive")
    return PhaseState(
        alpha_plus=relaxed.alpha_plus,
        rho_plus=relaxed.rho_plus * factor,
        rho_minus=relaxed.rho_minus * factor,
        u=relaxed.u,
    )
