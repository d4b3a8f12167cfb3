"""
Models package.

Physical-variable form of the damped Baer-Nunziato system and of the
pressure-relaxed Kapila system.
"""

from models.params import ModelParams
from models.state import PhaseState, PhaseTendency, KapilaTendency, GammaCoeffs
from models.equations import (
    NonPositiveDensityError,
    VacuumVolumeFractionError,
    ClosureViolatedError,
    DegenerateDenominatorError,
    phase_pressure_values,
    density_from_pressure,
    pressure,
    phase_pressures,
    mixture,
    momentum_tendency,
    relaxation_rate,
    bn_rhs,
    phase_pressure_tendency,
    kapila_state,
    closure_gap,
    kapila_rhs,
    gamma_coeffs,
    equilibrium_state
)

__all__ = [
    'ModelParams',
    'PhaseState',
    'PhaseTendency',
    'KapilaTendency',
    'GammaCoeffs',
    'NonPositiveDensityError',
    'VacuumVolumeFractionError',
    'ClosureViolatedError',
    'DegenerateDenominatorError',
    'phase_pressure_values',
    'density_from_pressure',
    'pressure',
    'phase_pressures',
    'mixture',
    'momentum_tendency',
    'relaxation_rate',
    'bn_rhs',
    'phase_pressure_tendency',
    'kapila_state',
    'closure_gap',
    'kapila_rhs',
    'gamma_coeffs',
    'equilibrium_state'
]
