"""
Diagnostics package.

Energy functionals of the frozen linear system and their decay monitor,
relaxation-limit differences, pressure-gap traces and the exact linear
propagator.
"""

from diagnostics.linear import (
    LinearCoeffs,
    LinearState,
    epsilon_ell,
    epsilon_h,
    kappa,
    propagate_linear_exact
)
from diagnostics.energy import (
    NotBlockLocalizedError,
    EpsTooLargeError,
    DecayViolatedError,
    EnergyTrace,
    EnergyMonitor,
    DecayReport,
    eps_cap,
    equivalence_bounds,
    lyapunov_block,
    decay_rate,
    monitor_decay
)
from diagnostics.relaxation import (
    ConservationMonitor,
    DeltaRelationError,
    DeltaState,
    PressureGapTrace,
    delta_quantities,
    pressure_gap_trace,
    relaxation_identity_residual
)

__all__ = [
    'LinearCoeffs',
    'LinearState',
    'epsilon_ell',
    'epsilon_h',
    'kappa',
    'propagate_linear_exact',
    'NotBlockLocalizedError',
    'EpsTooLargeError',
    'DecayViolatedError',
    'EnergyTrace',
    'EnergyMonitor',
    'DecayReport',
    'eps_cap',
    'equivalence_bounds',
    'lyapunov_block',
    'decay_rate',
    'monitor_decay',
    'DeltaRelationError',
    'DeltaState',
    'PressureGapTrace',
    'delta_quantities',
    'pressure_gap_trace',
    'relaxation_identity_residual',
    'ConservationMonitor'
]
