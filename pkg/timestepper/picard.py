"""
Picard iteration for the reformulated system.

Each iterate Z^{k+1} solves the system linearized around Z^k: transport by
u^k, coefficients F_i(Z^k), and the r-source F4(Z^k) (w^k)^2 / nu. With
Z^0 = 0 the first iterate is the solution of the constant-coefficient
linearization.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from spectral.fields import VectorField
from spectral.grid import GridSpec
from spectral.operators import advection, dealias, divergence, gradient, lame_apply
from models.params import ModelParams
from reformulation.system import ReformState, f_coefficient_values, invert_state
from timestepper.config import StepConfig
from timestepper.integrator import Trajectory, check_cfl
from timestepper.systems import ReformSystem, StateInadmissibleError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FrozenCoefficients:
    """Coefficients read from the previous iterate at one time level."""

    f0: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray
    source: np.ndarray
    velocity: VectorField


def freeze(previous: ReformState, p: ModelParams, radius: Optional[float] = None) -> FrozenCoefficients:
    """Evaluate F0..F3, the r-source and the velocity of a previous iterate."""
    alpha, rho_plus, rho_minus = invert_state(previous, p, radius=radius)
    w = previous.w.samples
    f1, f2, f3, f4 = f_coefficient_values(alpha, previous.r.samples + p.pressure_bar, w, p)
    rho = alpha * rho_plus + (1.0 - alpha) * rho_minus
    return FrozenCoefficients(f0=1.0 / rho, f1=f1, f2=f2, f3=f3,
                              source=f4 * w ** 2 / p.nu, velocity=previous.u)


class PicardSystem(ReformSystem):
    """Linear system in (y, w, r, u) with coefficients frozen from a previous iterate."""

    def __init__(self, grid: GridSpec, p: ModelParams, radius: Optional[float] = None):
        super().__init__(grid, p, radius=radius)
        self.frozen: Optional[FrozenCoefficients] = None

    def explicit_rhs(self, data: np.ndarray) -> np.ndarray:
        p, fc = self.p, self.frozen
        v = fc.velocity
        y, w, r = self._field(data[0]), self._field(data[1]), self._field(data[2])
        u = self._velocity(data)
        div_u = divergence(u)

        d_y = dealias(-advection(v, y))
        d_w = dealias(-advection(v, w) - fc.f1 * div_u)
        d_r = dealias(-advection(v, r) - fc.f3 * div_u + fc.source)

        force = (lame_apply(u, p.mu, p.lam_plus_mu) - gradient(r)
                 - gradient(w) * (p.gamma_plus - p.gamma_minus))
        d_u = [
            dealias(-advection(v, u_k) + fc.f0 * force_k - p.eta * u_k)
            for u_k, force_k in zip(u, force)
        ]
        return self._stack([d_y, d_w, d_r] + d_u)

    def relax(self, data: np.ndarray, tau: float) -> np.ndarray:
        out = data.copy()
        out[1] = data[1] * np.exp(-self.frozen.f2 * tau / self.p.nu)
        return out

    def check_admissible(self, data: np.ndarray) -> None:
        if not np.all(np.isfinite(data)):
            raise StateInadmissibleError("Non-finite values in a Picard iterate")


def zero_trajectory(grid: GridSpec, cfg: StepConfig) -> Trajectory:
    """The iterate Z^0 = 0 sampled at every step."""
    zero = ReformState.zeros(grid)
    trajectory = Trajectory(snapshot_dt=cfg.dt, steps=cfg.n_steps)
    for index in range(cfg.n_steps + 1):
        trajectory.append(index * cfg.dt, zero)
    return trajectory


def picard_step(previous: Trajectory, initial: ReformState, p: ModelParams, cfg: StepConfig,
                radius: Optional[float] = None) -> Trajectory:
    """
    Compute the next Picard iterate.
    
    Strang splitting as in the nonlinear solver; the first half relaxation and
    the first Heun stage read coefficients at t_n, the second stage and the
    second half relaxation read them at t_{n+1}.
    
    Args:
        previous: Previous iterate, one snapshot per step on [0, t_end]
        initial: Initial data
        p: Model parameters
        cfg: Step configuration (scheme is always the Strang splitting)
        radius: Inversion-ball radius
        
    Returns:
        Next iterate, one snapshot per step
        
    Raises:
        ValueError: If the previous iterate does not match the time grid
    """
    n_steps = cfg.n_steps
    if len(previous.states) != n_steps + 1 or abs(previous.snapshot_dt - cfg.dt) > 1e-12 * cfg.dt:
        raise ValueError(
            f"Previous iterate has {len(previous.states)} snapshots at spacing {previous.snapshot_dt}, "
            f"expected {n_steps + 1} at spacing {cfg.dt}"
        )

    grid = initial.grid
    system = PicardSystem(grid, p, radius=radius)
    frozen = [freeze(state, p, radius=radius) for state in previous.states]
    data = system.pack(initial)
    dt = cfg.dt

    trajectory = Trajectory(snapshot_dt=dt, steps=n_steps)
    trajectory.append(0.0, initial)
    for index in range(n_steps):
        check_cfl(system, data, cfg)
        system.frozen = frozen[index]
        data = system.relax(data, 0.5 * dt)
        k1 = system.explicit_rhs(data)
        system.frozen = frozen[index + 1]
        k2 = system.explicit_rhs(data + dt * k1)
        data = data + 0.5 * dt * (k1 + k2)
        data = system.relax(data, 0.5 * dt)
        system.check_admissible(data)
        trajectory.append((index + 1) * dt, system.unpack(data))
    return trajectory


def trajectory_gap(first: Trajectory, second: Trajectory) -> float:
    """sup over time and unknowns of |first - second|."""
    gap = 0.0
    for a, b in zip(first.states, second.states):
        for fa, fb in zip(a.fields(), b.fields()):
            gap = max(gap, float(np.max(np.abs(fa.samples - fb.samples))))
    return gap


@dataclass
class PicardResult:
    iterates: List[Trajectory] = field(default_factory=list)
    gaps: List[float] = field(default_factory=list)

    @property
    def ratios(self) -> List[float]:
        return [b / a if a > 0 else 0.0 for a, b in zip(self.gaps, self.gaps[1:])]

    @property
    def final(self) -> Trajectory:
        return self.iterates[-1]


def picard_iterate(initial: ReformState, p: ModelParams, cfg: StepConfig, iterations: int = 4,
                   radius: Optional[float] = None) -> PicardResult:
    """
    Run Picard iterates from Z^0 = 0 and record successive sup-norm gaps.
    
    Args:
        initial: Initial data
        p: Model parameters
        cfg: Step configuration
        iterations: Number of iterates after Z^0
        radius: Inversion-ball radius
        
    Returns:
        PicardResult with iterates Z^0..Z^iterations and the gaps between them
    """
    result = PicardResult()
    current = zero_trajectory(initial.grid, cfg)
    result.iterates.append(current)
    for k in range(iterations):
        following = picard_step(current, initial, p, cfg, radius=radius)
        result.gaps.append(trajectory_gap(following, current))
        logger.info(f"Picard iterate {k + 1}: gap {result.gaps[-1]:.3e}")
        result.iterates.append(following)
        current = following
    return result
