"""
One-step schemes on packed states.

strang_exact_relax: half relaxation, Heun RK2 on the explicit part, half
relaxation. imex_ark2: the ARS(2,2,2) pair, explicit on the transport part
and L-stable diagonally implicit on the stiff part. Both wrap the step in
half viscous substeps when the system uses an integrating factor.
"""

import math

import numpy as np

from timestepper.systems import RelaxationSystem

ARS_GAMMA = 1.0 - 1.0 / math.sqrt(2.0)
ARS_DELTA = 1.0 - 1.0 / (2.0 * ARS_GAMMA)


def heun(system: RelaxationSystem, data: np.ndarray, dt: float) -> np.ndarray:
    k1 = system.explicit_rhs(data)
    k2 = system.explicit_rhs(data + dt * k1)
    return data + 0.5 * dt * (k1 + k2)


def strang_exact_relax(system: RelaxationSystem, data: np.ndarray, dt: float) -> np.ndarray:
    data = system.relax(data, 0.5 * dt)
    data = heun(system, data, dt)
    return system.relax(data, 0.5 * dt)


def imex_ark2(system: RelaxationSystem, data: np.ndarray, dt: float) -> np.ndarray:
    gamma, delta = ARS_GAMMA, ARS_DELTA
    tau = gamma * dt

    k1 = system.explicit_rhs(data)
    z2 = data + tau * k1
    y2 = system.solve_stiff(z2, tau)
    s2 = (y2 - z2) / tau
    k2 = system.explicit_rhs(y2)

    z3 = data + dt * (delta * k1 + (1.0 - delta) * k2) + dt * (1.0 - gamma) * s2
    # stiffly accurate: the last stage is the new state
    return system.solve_stiff(z3, tau)


SCHEMES = {
    "strang_exact_relax": strang_exact_relax,
    "imex_ark2": imex_ark2,
}


def advance(system: RelaxationSystem, data: np.ndarray, dt: float, scheme: str) -> np.ndarray:
    data = system.viscous_substep(data, 0.5 * dt)
    data = SCHEMES[scheme](system, data, dt)
    return system.viscous_substep(data, 0.5 * dt)
