"""
Pressure laws and tendencies of the damped Baer-Nunziato system and of its
pressure-relaxed (Kapila) limit.

Nonlinear coefficients are evaluated pointwise; derivatives are spectral and
every tendency is truncated to the 2/3 band.
"""

import logging
from typing import Tuple

import numpy as np

from spectral.fields import Field, VectorField
from spectral.operators import (
    advection,
    dealias,
    dealiased_product,
    divergence,
    gradient,
    lame_apply
)
from models.params import ModelParams
from models.state import GammaCoeffs, KapilaTendency, PhaseState, PhaseTendency
from utils.errors import NumericalError

logger = logging.getLogger(__name__)

VACUUM_TOL = 1e-8
CLOSURE_TOL = 1e-8
DENOMINATOR_TOL = 1e-8


class NonPositiveDensityError(NumericalError):
    """Raised when a phase density is not positive."""
    code = "NON_POSITIVE_DENSITY"


class VacuumVolumeFractionError(NumericalError):
    """Raised when alpha_plus * alpha_minus falls below the vacuum guard."""
    code = "VACUUM_VOLUME_FRACTION"


class ClosureViolatedError(NumericalError):
    """Raised when a relaxed state does not satisfy P+ = P-."""
    code = "CLOSURE_VIOLATED"


class DegenerateDenominatorError(NumericalError):
    """Raised when a coefficient denominator vanishes."""
    code = "DEGENERATE_DENOMINATOR"


def phase_pressure_values(rho: np.ndarray, phase: str, p: ModelParams) -> np.ndarray:
    """Pointwise A * rho^gamma on raw arrays."""
    if np.any(rho <= 0):
        raise NonPositiveDensityError(f"Density of phase '{phase}' has min {float(np.min(rho)):.3e}")
    a, gamma = p.phase_constants(phase)
    return a * rho ** gamma


def density_from_pressure(pressure: np.ndarray, phase: str, p: ModelParams) -> np.ndarray:
    """Inverse pressure law (P/A)^{1/gamma}."""
    if np.any(pressure <= 0):
        raise NonPositiveDensityError(f"Pressure of phase '{phase}' has min {float(np.min(pressure)):.3e}")
    a, gamma = p.phase_constants(phase)
    return (pressure / a) ** (1.0 / gamma)


def pressure(rho: Field, phase: str, p: ModelParams, dealiased: bool = True) -> Field:
    """
    Barotropic pressure of one phase.
    
    Args:
        rho: Phase density (> 0 pointwise)
        phase: '+' or '-'
        p: Model parameters
        dealiased: Apply the 2/3 truncation to the result
        
    Returns:
        Pressure field A * rho^gamma
        
    Raises:
        NonPositiveDensityError: If rho <= 0 somewhere
    """
    result = Field(rho.grid, phase_pressure_values(rho.samples, phase, p))
    return dealias(result) if dealiased else result


def phase_pressures(state: PhaseState, p: ModelParams) -> Tuple[Field, Field]:
    """Pointwise (P+, P-) of a state."""
    return pressure(state.rho_plus, "+", p, dealiased=False), pressure(state.rho_minus, "-", p, dealiased=False)


def mixture(state: PhaseState, p: ModelParams) -> Tuple[Field, Field]:
    """
    Mixture density and pressure.
    
    Args:
        state: Phase state
        p: Model parameters
        
    Returns:
        (rho, P) with rho = a+ rho+ + a- rho- and P = a+ P+ + a- P-
    """
    p_plus, p_minus = phase_pressures(state, p)
    a_plus, a_minus = state.alpha_plus, state.alpha_minus
    rho = a_plus * state.rho_plus + a_minus * state.rho_minus
    return rho, a_plus * p_plus + a_minus * p_minus


def _check_vacuum(alpha_plus: Field) -> None:
    product = alpha_plus.samples * (1.0 - alpha_plus.samples)
    if product.min() < VACUUM_TOL:
        raise VacuumVolumeFractionError(f"min alpha+ alpha- = {product.min():.3e} below {VACUUM_TOL}")


def _check_densities(state: PhaseState) -> None:
    for name, rho in (("rho_plus", state.rho_plus), ("rho_minus", state.rho_minus)):
        if rho.min() < VACUUM_TOL:
            raise NonPositiveDensityError(f"{name} has min {rho.min():.3e}")


def momentum_tendency(u: VectorField, rho: Field, grad_p: VectorField, p: ModelParams,
                      viscous: bool = True) -> VectorField:
    """-u.grad u + (A u - grad P)/rho - eta u, without the final truncation."""
    inv_rho = 1.0 / rho
    force = lame_apply(u, p.mu, p.lam_plus_mu) - grad_p if viscous else -grad_p
    return VectorField(tuple(
        -advection(u, u_k) + inv_rho * f_k - p.eta * u_k
        for u_k, f_k in zip(u, force)
    ))


def relaxation_rate(state: PhaseState, p: ModelParams) -> Field:
    """alpha+ alpha- (P+ - P-) / nu."""
    p_plus, p_minus = phase_pressures(state, p)
    return state.alpha_plus * state.alpha_minus * (p_plus - p_minus) / p.nu


def bn_rhs(state: PhaseState, p: ModelParams) -> PhaseTendency:
    """
    Tendency of the damped Baer-Nunziato system.
    
    Phase densities come from the conservative mass equations divided by
    alpha; the velocity from the momentum equation divided by rho.
    
    Args:
        state: Phase state
        p: Model parameters
        
    Returns:
        PhaseTendency of (alpha_plus, rho_plus, rho_minus, u)
        
    Raises:
        VacuumVolumeFractionError: If min alpha+ alpha- < 1e-8
        NonPositiveDensityError: If a density is not positive
    """
    _check_vacuum(state.alpha_plus)
    _check_densities(state)
    u = state.u
    a_plus, a_minus = state.alpha_plus, state.alpha_minus

    d_alpha = -advection(u, a_plus) + relaxation_rate(state, p)

    def density_tendency(alpha: Field, rho: Field, d_alpha_phase: Field) -> Field:
        mass = alpha * rho
        flux = VectorField(tuple(dealiased_product(mass, u_k) for u_k in u))
        return (-divergence(flux) - rho * d_alpha_phase) / alpha

    d_rho_plus = density_tendency(a_plus, state.rho_plus, d_alpha)
    d_rho_minus = density_tendency(a_minus, state.rho_minus, -d_alpha)

    rho, p_mix = mixture(state, p)
    d_u = momentum_tendency(u, rho, gradient(p_mix), p)

    return PhaseTendency(
        alpha_plus=dealias(d_alpha),
        rho_plus=dealias(d_rho_plus),
        rho_minus=dealias(d_rho_minus),
        u=d_u.map(dealias),
    )


def phase_pressure_tendency(state: PhaseState, p: ModelParams) -> Tuple[Field, Field]:
    """
    Tendencies of P+ and P- implied by the Baer-Nunziato system.
    
    D_t P+ = -g+ P+ div u - g+ a- P+ (P+ - P-)/nu and
    D_t P- = -g- P- div u + g- a+ P- (P+ - P-)/nu.
    """
    _check_vacuum(state.alpha_plus)
    u = state.u
    p_plus, p_minus = phase_pressures(state, p)
    gap = p_plus - p_minus
    div_u = divergence(u)
    d_plus = (-advection(u, p_plus) - p.gamma_plus * p_plus * div_u
              - p.gamma_plus * state.alpha_minus * p_plus * gap / p.nu)
    d_minus = (-advection(u, p_minus) - p.gamma_minus * p_minus * div_u
               + p.gamma_minus * state.alpha_plus * p_minus * gap / p.nu)
    return dealias(d_plus), dealias(d_minus)


def kapila_state(alpha_plus: Field, pressure_field: Field, u: VectorField, p: ModelParams) -> PhaseState:
    """Phase state of the relaxed system, densities recovered from the common pressure."""
    grid = alpha_plus.grid
    return PhaseState(
        alpha_plus=alpha_plus,
        rho_plus=Field(grid, density_from_pressure(pressure_field.samples, "+", p)),
        rho_minus=Field(grid, density_from_pressure(pressure_field.samples, "-", p)),
        u=u,
    )


def closure_gap(state: PhaseState, p: ModelParams) -> float:
    p_plus, p_minus = phase_pressures(state, p)
    return (p_plus - p_minus).sup_norm()


def kapila_rhs(state: PhaseState, p: ModelParams) -> KapilaTendency:
    """
    Tendency of the relaxed system in the variables (alpha_plus, P, u).
    
    Args:
        state: Phase state satisfying P+ = P-
        p: Model parameters
        
    Returns:
        KapilaTendency of (alpha_plus, P, u)
        
    Raises:
        ClosureViolatedError: If ||P+ - P-||_inf >= 1e-8
    """
    gap = closure_gap(state, p)
    if gap >= CLOSURE_TOL:
        raise ClosureViolatedError(f"Relaxed state has ||P+ - P-||_inf = {gap:.3e}")
    _check_vacuum(state.alpha_plus)

    u = state.u
    a_plus, a_minus = state.alpha_plus, state.alpha_minus
    rho, p_mix = mixture(state, p)
    denominator = p.gamma_plus * a_minus + p.gamma_minus * a_plus
    div_u = divergence(u)

    d_alpha = (-advection(u, a_plus)
               - (p.gamma_plus - p.gamma_minus) * a_plus * a_minus / denominator * div_u)
    d_pressure = (-advection(u, p_mix)
                  - p.gamma_plus * p.gamma_minus * p_mix / denominator * div_u)
    d_u = momentum_tendency(u, rho, gradient(p_mix), p, viscous=False)

    return KapilaTendency(
        alpha_plus=dealias(d_alpha),
        pressure=dealias(d_pressure),
        u=d_u.map(dealias),
    )


def gamma_coeffs(state: PhaseState, p: ModelParams) -> GammaCoeffs:
    """
    Coefficient functions Gamma_1..Gamma_4 of the difference system.
    
    With D = g+ a- P+ + g- a+ P-: Gamma_1 = -a+ a- / D, Gamma_2 = g+ a- P+ / D,
    Gamma_3 = g+ g- P+ P- / D, Gamma_4 = (g+ P+ - g- P-) / D.
    
    Raises:
        DegenerateDenominatorError: If |D| < 1e-8 somewhere
    """
    p_plus, p_minus = phase_pressures(state, p)
    a_plus, a_minus = state.alpha_plus, state.alpha_minus
    denominator = p.gamma_plus * a_minus * p_plus + p.gamma_minus * a_plus * p_minus
    if np.abs(denominator.samples).min() < DENOMINATOR_TOL:
        raise DegenerateDenominatorError("Gamma coefficient denominator vanishes")
    return GammaCoeffs(
        gamma1=-a_plus * a_minus / denominator,
        gamma2=p.gamma_plus * a_minus * p_plus / denominator,
        gamma3=p.gamma_plus * p.gamma_minus * p_plus * p_minus / denominator,
        gamma4=(p.gamma_plus * p_plus - p.gamma_minus * p_minus) / denominator,
    )


def equilibrium_state(grid, p: ModelParams) -> PhaseState:
    """Constant state (alpha_bar_plus, rho_bar_plus, rho_bar_minus, 0)."""
    return PhaseState(
        alpha_plus=Field.constant(grid, p.alpha_bar_plus),
        rho_plus=Field.constant(grid, p.rho_bar_plus),
        rho_minus=Field.constant(grid, p.rho_bar_minus),
        u=VectorField.zeros(grid),
    )
