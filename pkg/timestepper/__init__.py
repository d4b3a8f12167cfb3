"""
Timestepper package.

Strang and IMEX integration of the Baer-Nunziato, relaxed, reformulated and
frozen linear systems, plus the Picard iteration of the reformulated system.
"""

from timestepper.config import StepConfig
from timestepper.systems import (
    StateInadmissibleError,
    RelaxationSystem,
    BaerNunziatoSystem,
    KapilaSystem,
    ReformSystem,
    LinearSystem
)
from timestepper.schemes import strang_exact_relax, imex_ark2, advance
from timestepper.integrator import (
    CflViolationError,
    Trajectory,
    make_system,
    check_cfl,
    step,
    integrate
)
from timestepper.picard import (
    FrozenCoefficients,
    PicardSystem,
    PicardResult,
    freeze,
    zero_trajectory,
    picard_step,
    picard_iterate,
    trajectory_gap
)

__all__ = [
    'StepConfig',
    'StateInadmissibleError',
    'RelaxationSystem',
    'BaerNunziatoSystem',
    'KapilaSystem',
    'ReformSystem',
    'LinearSystem',
    'strang_exact_relax',
    'imex_ark2',
    'advance',
    'CflViolationError',
    'Trajectory',
    'make_system',
    'check_cfl',
    'step',
    'integrate',
    'FrozenCoefficients',
    'PicardSystem',
    'PicardResult',
    'freeze',
    'zero_trajectory',
    'picard_step',
    'picard_iterate',
    'trajectory_gap'
]
