"""
Monitors of the relaxation limit: differences between a Baer-Nunziato state
and a relaxed (Kapila) state, the pressure-gap trace, and the residual of the
relaxation identity along a trajectory.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from spectral.fields import Field, VectorField
from spectral.operators import advection, divergence
from littlewood_paley.norms import besov_norm
from models.equations import density_from_pressure, gamma_coeffs, phase_pressures
from models.params import ModelParams
from models.state import PhaseState
from utils.errors import NumericalError

logger = logging.getLogger(__name__)

DELTA_RELATION_TOL = 1e-10


class DeltaRelationError(NumericalError):
    """Raised when derived differences disagree with direct subtraction."""
    code = "DELTA_RELATION"


@dataclass(frozen=True, eq=False)
class DeltaState:
    """Differences (relaxing state) - (relaxed state)."""

    delta_Y_plus: Field
    delta_Q_plus: Field
    delta_u: VectorField
    delta_alpha_plus: Field
    delta_rho_plus: Field
    delta_rho_minus: Field
    delta_rho: Field
    delta_P_plus: Field
    delta_P_minus: Field
    delta_P: Field
    relation_residual: float = 0.0

    def primary(self):
        return (self.delta_Y_plus, self.delta_Q_plus) + tuple(self.delta_u)


def _mass_fraction(state: PhaseState) -> Field:
    mass = state.alpha_plus * state.rho_plus
    return mass / (mass + state.alpha_minus * state.rho_minus)


def delta_quantities(bn_state: PhaseState, kapila_state: PhaseState, p: ModelParams,
                     tol: float = DELTA_RELATION_TOL) -> DeltaState:
    """
    Primary differences dY+, dQ+, du and the derived differences.
    
    dQ+ = P+^nu - Gamma2 (P+^nu - P-^nu) - P, with Gamma2 taken at the
    relaxing state and P the mixture pressure of the relaxed state. Derived
    differences come from the algebraic relations: dP+- from dQ+ and the
    gap, drho+- by inverting the pressure laws at P + dP+-. They are
    checked against direct subtraction of the stored fields, which also
    checks that the relaxed state closes (P+ = P- = P).
    
    Args:
        bn_state: Relaxing (Baer-Nunziato) state
        kapila_state: Relaxed state on the same grid
        p: Model parameters
        tol: Accepted relative mismatch of the derived differences
        
    Returns:
        DeltaState
        
    Raises:
        DeltaRelationError: If a derived difference misses its direct value
    """
    pp_nu, pm_nu = phase_pressures(bn_state, p)
    pp, pm = phase_pressures(kapila_state, p)
    a_plus, a_minus = kapila_state.alpha_plus, kapila_state.alpha_minus
    p_mix = a_plus * pp + a_minus * pm
    gap_nu = pp_nu - pm_nu
    gamma2 = gamma_coeffs(bn_state, p).gamma2

    delta_y = _mass_fraction(bn_state) - _mass_fraction(kapila_state)
    delta_q = pp_nu - gamma2 * gap_nu - p_mix
    delta_u = bn_state.u - kapila_state.u

    delta_p_plus = delta_q + gamma2 * gap_nu
    delta_p_minus = delta_q + (gamma2 - 1.0) * gap_nu
    delta_p = delta_q + (gamma2 - bn_state.alpha_minus) * gap_nu

    def density_shift(phase: str, shift: Field) -> Field:
        grid = p_mix.grid
        shifted = density_from_pressure((p_mix + shift).samples, phase, p)
        return Field(grid, shifted - density_from_pressure(p_mix.samples, phase, p))

    delta_rho_plus = density_shift("+", delta_p_plus)
    delta_rho_minus = density_shift("-", delta_p_minus)

    rho_plus, rho_minus = kapila_state.rho_plus, kapila_state.rho_minus
    rho_plus_nu, rho_minus_nu = bn_state.rho_plus, bn_state.rho_minus
    rho = a_plus * rho_plus + a_minus * rho_minus
    rho_nu = bn_state.alpha_plus * rho_plus_nu + bn_state.alpha_minus * rho_minus_nu
    delta_alpha = ((delta_y * rho_nu * rho - a_plus * a_minus * (rho_minus * delta_rho_plus - rho_plus * delta_rho_minus))
                   / (a_minus * rho_plus_nu * rho_minus + a_plus * rho_plus * rho_minus_nu))
    delta_rho = (rho_plus_nu - rho_minus_nu) * delta_alpha + a_plus * delta_rho_plus + a_minus * delta_rho_minus

    p_nu_mix = bn_state.alpha_plus * pp_nu + bn_state.alpha_minus * pm_nu
    checks = {
        "delta_alpha_plus": (delta_alpha, bn_state.alpha_plus - kapila_state.alpha_plus),
        "delta_rho_plus": (delta_rho_plus, rho_plus_nu - rho_plus),
        "delta_rho_minus": (delta_rho_minus, rho_minus_nu - rho_minus),
        "delta_rho": (delta_rho, rho_nu - rho),
        "delta_P_plus": (delta_p_plus, pp_nu - pp),
        "delta_P_minus": (delta_p_minus, pm_nu - pm),
        "delta_P": (delta_p, p_nu_mix - p_mix),
    }
    worst = 0.0
    for name, (derived, direct) in checks.items():
        scale = max(1.0, direct.sup_norm())
        residual = (derived - direct).sup_norm() / scale
        worst = max(worst, residual)
        if residual > tol:
            logger.error(f"{name}: derived value misses direct subtraction by {residual:.3e}")
            raise DeltaRelationError(f"{name} relation residual {residual:.3e} exceeds {tol:.1e}")

    return DeltaState(
        delta_Y_plus=delta_y, delta_Q_plus=delta_q, delta_u=delta_u,
        delta_alpha_plus=delta_alpha, delta_rho_plus=delta_rho_plus,
        delta_rho_minus=delta_rho_minus, delta_rho=delta_rho,
        delta_P_plus=delta_p_plus, delta_P_minus=delta_p_minus, delta_P=delta_p,
        relation_residual=worst,
    )


@dataclass
class PressureGapTrace:
    """||P+ - P-||_{B^s} per time and the running integral of ||(P+ - P-)/nu||_{B^s}."""

    times: List[float] = field(default_factory=list)
    norms: Dict[float, List[float]] = field(default_factory=dict)
    integrals: Dict[float, List[float]] = field(default_factory=dict)

    def sup(self, s: float) -> float:
        return max(self.norms[s])

    def rows(self):
        """CSV rows (t, s, besov_norm)."""
        return [(t, s, value) for s in sorted(self.norms) for t, value in zip(self.times, self.norms[s])]


def pressure_gap_trace(trajectory, p: ModelParams, s_list: Sequence[float]) -> PressureGapTrace:
    """
    Besov norms of the pressure gap along a Baer-Nunziato trajectory.
    
    Args:
        trajectory: Object with .times and .states (PhaseState snapshots)
        p: Model parameters
        s_list: Regularity indices
        
    Returns:
        PressureGapTrace with left-rectangle running integrals
    """
    trace = PressureGapTrace(times=list(trajectory.times))
    for s in s_list:
        norms = []
        for state in trajectory.states:
            pp, pm = phase_pressures(state, p)
            norms.append(besov_norm(pp - pm, s).total)
        integrals = [0.0]
        for k in range(1, len(norms)):
            dt = trace.times[k] - trace.times[k - 1]
            integrals.append(integrals[-1] + dt * norms[k - 1] / p.nu)
        trace.norms[s] = norms
        trace.integrals[s] = integrals
    return trace


def relaxation_identity_residual(trajectory, p: ModelParams) -> float:
    """
    Max relative residual of
        a+ a- g / nu = -a+ a- / D (D_t g + (g+ P+ - g- P-) div u),
    D = g+ a- P+ + g- a+ P-, g = P+ - P-, with D_t from centered differences
    between snapshots.
    """
    states = trajectory.states
    times = trajectory.times
    if len(states) < 3:
        raise ValueError("Need at least 3 snapshots for centered differences")
    worst = 0.0
    for k in range(1, len(states) - 1):
        state = states[k]
        pp, pm = phase_pressures(state, p)
        gap = pp - pm
        previous_gap = _gap(states[k - 1], p)
        next_gap = _gap(states[k + 1], p)
        dgap_dt = (next_gap - previous_gap) / (times[k + 1] - times[k - 1])
        material = dgap_dt + advection(state.u, gap)
        a_plus, a_minus = state.alpha_plus, state.alpha_minus
        denominator = p.gamma_plus * a_minus * pp + p.gamma_minus * a_plus * pm
        lhs = a_plus * a_minus * gap / p.nu
        rhs = -a_plus * a_minus / denominator * (
            material + (p.gamma_plus * pp - p.gamma_minus * pm) * divergence(state.u))
        scale = max(lhs.sup_norm(), 1e-300)
        worst = max(worst, (lhs - rhs).sup_norm() / scale)
    return worst


def _gap(state: PhaseState, p: ModelParams) -> Field:
    pp, pm = phase_pressures(state, p)
    return pp - pm


class ConservationMonitor:
    """Observer recording the spatial means of the phase masses a+ rho+ and a- rho-."""

    def __init__(self):
        self.times: List[float] = []
        self.mass_plus: List[float] = []
        self.mass_minus: List[float] = []

    def __call__(self, time: float, state: PhaseState) -> None:
        if not isinstance(state, PhaseState):
            raise TypeError(f"Phase masses need a PhaseState, got {type(state).__name__}")
        self.times.append(time)
        self.mass_plus.append((state.alpha_plus * state.rho_plus).mean())
        self.mass_minus.append((state.alpha_minus * state.rho_minus).mean())

    def drift(self) -> Dict[str, float]:
        """Largest deviation of each mean from its initial value."""
        if not self.times:
            return {"mass_plus": 0.0, "mass_minus": 0.0}
        return {
            "mass_plus": float(np.max(np.abs(np.asarray(self.mass_plus) - self.mass_plus[0]))),
            "mass_minus": float(np.max(np.abs(np.asarray(self.mass_minus) - self.mass_minus[0]))),
        }

    def rows(self):
        """CSV rows (t, mass_plus, mass_minus)."""
        return list(zip(self.times, self.mass_plus, self.mass_minus))
