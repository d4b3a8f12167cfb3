"""
Good unknowns (y, w, r, u) and the reformulated system.

    D_t y = 0
    D_t w = -F1 div u - F2 w / nu
    D_t r = -F3 div u + F4 w^2 / nu
    D_t u = F0 (A u - grad r - (g+ - g-) grad w) - eta u

with y = Y - Y_bar, r = R - P_bar and F0 = 1/rho. G_i = F_i - F_bar_i.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from spectral.fields import Field, VectorField
from spectral.operators import advection, dealias, divergence, gradient, lame_apply
from models.equations import bn_rhs
from models.params import ModelParams
from models.state import PhaseState
from reformulation.change_of_unknowns import (
    phi_forward,
    phi_jacobian_values,
    psi_inverse,
    psi_values
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ReformState:
    """Perturbation unknowns (y, w, r, u) around the constant equilibrium."""

    y: Field
    w: Field
    r: Field
    u: VectorField

    @property
    def grid(self):
        return self.y.grid

    def fields(self):
        return (self.y, self.w, self.r) + tuple(self.u)

    @classmethod
    def field_names(cls, dim: int):
        return ("y", "w", "r") + tuple(f"u{k}" for k in range(dim))

    @classmethod
    def zeros(cls, grid) -> "ReformState":
        zero = Field.zeros(grid)
        return cls(y=zero, w=zero, r=zero, u=VectorField.zeros(grid))


@dataclass(frozen=True, eq=False)
class ReformTendency:
    y: Field
    w: Field
    r: Field
    u: VectorField


@dataclass(frozen=True)
class BarConstants:
    """Coefficient values at the constant equilibrium."""

    F0: float
    F1: float
    F2: float
    F3: float
    F4: float

    @classmethod
    def from_params(cls, p: ModelParams) -> "BarConstants":
        a, b = p.alpha_bar_plus, p.alpha_bar_minus
        gp, gm = p.gamma_plus, p.gamma_minus
        d = gp * b + gm * a
        p_bar = p.pressure_bar
        return cls(
            F0=1.0 / p.rho_bar,
            F1=(gp - gm) * a * b * p_bar / d,
            F2=d * p_bar,
            F3=gp * gm * p_bar / d,
            F4=gp * gm * (1.0 - d) / (a * b),
        )


def f_coefficient_values(alpha: np.ndarray, big_r: np.ndarray, w: np.ndarray,
                         p: ModelParams) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Pointwise F1..F4 from (alpha_plus, R, w)."""
    a, b = alpha, 1.0 - alpha
    gp, gm = p.gamma_plus, p.gamma_minus
    d = gp * b + gm * a
    f1 = (gp - gm) * a * b * big_r / d + (gp ** 2 * b + gm ** 2 * a) * w / d
    f2 = d * big_r - ((gp - gp ** 2) * b ** 2 - (gm - gm ** 2) * a ** 2) * w / (a * b)
    f3 = gp * gm * (big_r + (gp - gm) * w) / d
    f4 = gp * gm * (1.0 - d) / (a * b)
    return f1, f2, f3, f4


def to_reform_state(state: PhaseState, p: ModelParams) -> ReformState:
    """Map a phase state to the good unknowns."""
    w, big_r, y = phi_forward(state.alpha_plus, state.rho_plus, state.rho_minus, p)
    return ReformState(y=y - p.mass_fraction_bar, w=w, r=big_r - p.pressure_bar, u=state.u)


def invert_state(state: ReformState, p: ModelParams, radius: Optional[float] = None,
                 initial_guess=None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(alpha_plus, rho_plus, rho_minus) arrays of a reformulated state."""
    return psi_values(
        state.w.samples,
        state.r.samples + p.pressure_bar,
        state.y.samples + p.mass_fraction_bar,
        p,
        radius=radius,
        initial_guess=initial_guess,
    )


def to_phase_state(state: ReformState, p: ModelParams, radius: Optional[float] = None) -> PhaseState:
    """Map the good unknowns back to a phase state."""
    alpha, rho_plus, rho_minus = psi_inverse(state.w, state.r + p.pressure_bar, state.y + p.mass_fraction_bar,
                                             p, radius=radius)
    return PhaseState(alpha, rho_plus, rho_minus, state.u)


def coefficients_f(state: ReformState, p: ModelParams, radius: Optional[float] = None,
                   alpha: Optional[np.ndarray] = None) -> Tuple[Field, Field, Field, Field]:
    """
    Coefficient fields F1..F4 of the reformulated system.
    
    Args:
        state: Reformulated state
        p: Model parameters
        radius: Inversion-ball radius
        alpha: Precomputed alpha_plus samples (skips the inversion)
        
    Returns:
        Fields (F1, F2, F3, F4)
        
    Raises:
        NewtonDivergedError: If the inversion fails
        OutsideInversionBallError: If the state leaves the inversion ball
    """
    if alpha is None:
        alpha = invert_state(state, p, radius=radius)[0]
    values = f_coefficient_values(alpha, state.r.samples + p.pressure_bar, state.w.samples, p)
    return tuple(Field(state.grid, v) for v in values)


def coefficients_g(state: ReformState, p: ModelParams, radius: Optional[float] = None):
    """Variable parts G_i = F_i - F_bar_i for i = 0..3."""
    grid = state.grid
    alpha, rho_plus, rho_minus = invert_state(state, p, radius=radius)
    f1, f2, f3, _ = coefficients_f(state, p, alpha=alpha)
    bars = BarConstants.from_params(p)
    rho = alpha * rho_plus + (1.0 - alpha) * rho_minus
    g0 = Field(grid, 1.0 / rho - bars.F0)
    return g0, f1 - bars.F1, f2 - bars.F2, f3 - bars.F3


def reform_rhs(state: ReformState, p: ModelParams, radius: Optional[float] = None) -> ReformTendency:
    """
    Tendency of the reformulated system.
    
    Args:
        state: Reformulated state inside the inversion ball
        p: Model parameters
        radius: Inversion-ball radius
        
    Returns:
        ReformTendency of (y, w, r, u)
    """
    grid = state.grid
    alpha, rho_plus, rho_minus = invert_state(state, p, radius=radius)
    f1, f2, f3, f4 = coefficients_f(state, p, alpha=alpha)
    f0 = Field(grid, 1.0 / (alpha * rho_plus + (1.0 - alpha) * rho_minus))

    u, w, r = state.u, state.w, state.r
    div_u = divergence(u)
    d_y = -advection(u, state.y)
    d_w = -advection(u, w) - f1 * div_u - f2 * w / p.nu
    d_r = -advection(u, r) - f3 * div_u + f4 * w * w / p.nu

    force = lame_apply(u, p.mu, p.lam_plus_mu) - gradient(r) - gradient(w) * (p.gamma_plus - p.gamma_minus)
    d_u = VectorField(tuple(
        -advection(u, u_k) + f0 * force_k - p.eta * u_k
        for u_k, force_k in zip(u, force)
    ))
    return ReformTendency(
        y=dealias(d_y),
        w=dealias(d_w),
        r=dealias(d_r),
        u=d_u.map(dealias),
    )


def chain_rule_tendency(state: PhaseState, p: ModelParams) -> ReformTendency:
    """Tendency of Phi(state) obtained from bn_rhs through the Jacobian of Phi."""
    grid = state.grid
    tendency = bn_rhs(state, p)
    jac = phi_jacobian_values(state.alpha_plus.samples, state.rho_plus.samples, state.rho_minus.samples, p)
    dx = np.stack([tendency.alpha_plus.samples, tendency.rho_plus.samples, tendency.rho_minus.samples], axis=-1)
    dz = np.einsum("...ij,...j->...i", jac, dx)
    return ReformTendency(
        y=Field(grid, dz[..., 2]),
        w=Field(grid, dz[..., 0]),
        r=Field(grid, dz[..., 1]),
        u=tendency.u,
    )
