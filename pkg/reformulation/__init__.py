"""
Reformulation package.

Change of unknowns to (w, R, Y), its Newton inverse, the coefficients
F0..F4 and the reformulated system in the good unknowns (y, w, r, u).
"""

from reformulation.change_of_unknowns import (
    NewtonDivergedError,
    OutsideInversionBallError,
    gap_weight,
    phi_values,
    phi_jacobian_values,
    phi_forward,
    scaled_distance,
    psi_values,
    psi_inverse,
    roundtrip_residuals
)
from reformulation.system import (
    ReformState,
    ReformTendency,
    BarConstants,
    f_coefficient_values,
    to_reform_state,
    invert_state,
    to_phase_state,
    coefficients_f,
    coefficients_g,
    reform_rhs,
    chain_rule_tendency
)

__all__ = [
    'NewtonDivergedError',
    'OutsideInversionBallError',
    'gap_weight',
    'phi_values',
    'phi_jacobian_values',
    'phi_forward',
    'scaled_distance',
    'psi_values',
    'psi_inverse',
    'roundtrip_residuals',
    'ReformState',
    'ReformTendency',
    'BarConstants',
    'f_coefficient_values',
    'to_reform_state',
    'invert_state',
    'to_phase_state',
    'coefficients_f',
    'coefficients_g',
    'reform_rhs',
    'chain_rule_tendency'
]
