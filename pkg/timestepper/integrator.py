"""
Time integration driver: single steps, trajectories and observers.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Sequence

import numpy as np

from diagnostics.linear import LinearCoeffs, LinearState
from models.params import ModelParams
from models.state import PhaseState
from reformulation.system import ReformState
from spectral.fields import VectorField
from timestepper.config import StepConfig
from timestepper.schemes import advance
from timestepper.systems import (
    BaerNunziatoSystem,
    KapilaSystem,
    LinearSystem,
    ReformSystem,
    RelaxationSystem,
    StateInadmissibleError
)
from utils.errors import NumericalError

logger = logging.getLogger(__name__)

Observer = Callable[[float, Any], None]


class CflViolationError(NumericalError):
    """Raised when dt exceeds the acoustic CFL bound."""
    code = "CFL_VIOLATION"


@dataclass
class Trajectory:
    """
    Snapshots of a run, taken every snapshot_dt and at the final time.

    times holds the actual stamps: the last interval is shorter when the step
    count is not a multiple of snapshot_every, so time quadratures should use
    times rather than snapshot_dt.
    """

    times: List[float] = field(default_factory=list)
    states: List[Any] = field(default_factory=list)
    snapshot_dt: float = 0.0
    steps: int = 0

    @property
    def final(self):
        return self.states[-1]

    def append(self, time: float, state) -> None:
        self.times.append(time)
        self.states.append(state)


def make_system(state, p, cfg: StepConfig, model: str = "bn", radius: Optional[float] = None,
                v: Optional[VectorField] = None) -> RelaxationSystem:
    """
    Select the system adapter matching the state type.
    
    Args:
        state: PhaseState, ReformState or LinearState
        p: ModelParams (or LinearCoeffs for a LinearState)
        cfg: Step configuration
        model: "bn" or "kapila" for a PhaseState
        radius: Inversion-ball radius for the reformulated system
        v: Frozen advecting field for the linear system
        
    Returns:
        The system adapter
    """
    grid = state.grid
    factor = cfg.viscous_integrating_factor
    if isinstance(state, LinearState):
        if not isinstance(p, LinearCoeffs):
            raise TypeError("A LinearState needs LinearCoeffs")
        return LinearSystem(grid, p, v=v, integrating_factor=factor)
    if isinstance(state, ReformState):
        return ReformSystem(grid, p, integrating_factor=factor, radius=radius)
    if isinstance(state, PhaseState):
        if model == "kapila":
            return KapilaSystem(grid, p)
        if model == "bn":
            return BaerNunziatoSystem(grid, p, integrating_factor=factor)
        raise ValueError(f"Unknown model '{model}', expected 'bn' or 'kapila'")
    raise TypeError(f"Unsupported state type {type(state).__name__}")


def check_cfl(system: RelaxationSystem, data: np.ndarray, cfg: StepConfig) -> None:
    speed = system.wave_speed(data)
    if speed <= 0:
        return
    limit = cfg.cfl_safety * system.grid.spacing / speed
    if cfg.dt > limit:
        raise CflViolationError(
            f"dt = {cfg.dt:.3e} exceeds CFL limit {limit:.3e} (wave speed {speed:.3e})"
        )


def warn_unresolved_relaxation(system: RelaxationSystem, cfg: StepConfig) -> bool:
    """
    Warn when the Strang splitting runs with dt > nu on a relaxing system.

    The exact relax substep then damps the quasi-steady pressure gap that the
    transport stage has just created, so w and the damped-mode integral come
    out far too small. imex_ark2 keeps them.

    Returns:
        True if the warning was issued
    """
    if cfg.scheme != "strang_exact_relax" or not isinstance(system, (BaerNunziatoSystem, ReformSystem)):
        return False
    nu = system.p.nu
    if cfg.dt <= nu:
        return False
    logger.warning(f"strang_exact_relax with dt = {cfg.dt:.3e} > nu = {nu:.3e} under-resolves the damped mode; "
                   f"use imex_ark2")
    return True


def step_packed(system: RelaxationSystem, data: np.ndarray, cfg: StepConfig) -> np.ndarray:
    check_cfl(system, data, cfg)
    new = advance(system, data, cfg.dt, cfg.scheme)
    system.check_admissible(new)
    return new


def step(state, p, cfg: StepConfig, model: str = "bn", **system_options):
    """
    Advance a state by one time step.
    
    Args:
        state: PhaseState, ReformState or LinearState
        p: Model parameters or linear coefficients
        cfg: Step configuration
        model: "bn" or "kapila" when state is a PhaseState
        
    Returns:
        State at t + dt
        
    Raises:
        CflViolationError: If dt exceeds the CFL limit
        StateInadmissibleError: If the new state is not admissible
    """
    system = make_system(state, p, cfg, model=model, **system_options)
    data = system.pack(state)
    system.check_admissible(data)
    return system.unpack(step_packed(system, data, cfg))


def integrate(state, p, cfg: StepConfig, observers: Sequence[Observer] = (), model: str = "bn",
              system: Optional[RelaxationSystem] = None, **system_options) -> Trajectory:
    """
    Integrate from t = 0 to cfg.t_end, recording snapshots.
    
    Observers are called as observer(t, state) at t = 0 and every
    snapshot_every steps (and at the final time).
    
    Args:
        state: Initial state
        p: Model parameters or linear coefficients
        cfg: Step configuration
        observers: Callables invoked at snapshot times
        model: "bn" or "kapila" when state is a PhaseState
        system: Prebuilt system adapter (overrides model selection)
        
    Returns:
        Trajectory of snapshots
    """
    system = system or make_system(state, p, cfg, model=model, **system_options)
    data = system.pack(state)
    system.check_admissible(data)

    warn_unresolved_relaxation(system, cfg)
    n_steps = cfg.n_steps
    if abs(n_steps * cfg.dt - cfg.t_end) > 1e-9 * cfg.t_end:
        logger.warning(f"t_end = {cfg.t_end} is not a multiple of dt = {cfg.dt}; running {n_steps} steps")

    trajectory = Trajectory(snapshot_dt=cfg.dt * cfg.snapshot_every, steps=n_steps)
    if n_steps % cfg.snapshot_every:
        logger.info(f"{n_steps} steps is not a multiple of snapshot_every = {cfg.snapshot_every}; "
                    f"the last snapshot interval is {(n_steps % cfg.snapshot_every) * cfg.dt:.4g}")

    def record(time: float, current) -> None:
        trajectory.append(time, current)
        for observer in observers:
            observer(time, current)

    record(0.0, state)
    progress_every = max(1, n_steps // 10)
    name = type(system).__name__
    for index in range(1, n_steps + 1):
        try:
            data = step_packed(system, data, cfg)
        except NumericalError as e:
            logger.error(f"{name} failed at step {index} (t = {index * cfg.dt:.4g}): {e}")
            raise
        if index % cfg.snapshot_every == 0 or index == n_steps:
            record(index * cfg.dt, system.unpack(data))
        if index % progress_every == 0:
            logger.info(f"{name}: step {index}/{n_steps}, t = {index * cfg.dt:.4g}")

    return trajectory
