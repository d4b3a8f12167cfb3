"""
Block energy functionals L_j of the linear system and their monitors.

For j <= 0:
    L_j^2 = int (h6/h1) w_j^2 + (h5/h3) r_j^2 + |u_j|^2 + 2 eps u_j . grad r_j
For j > 0 the weights are (h6+H6)/(h1+H1), (h5+H5)/(h3+H3) evaluated
pointwise and the cross term carries eps 2^{-2j}.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from spectral.fields import Field, VectorField
from spectral.operators import gradient
from littlewood_paley.decomposition import decompose, is_block_localized
from littlewood_paley.norms import besov_norm
from models.params import ModelParams
from models.state import PhaseState
from reformulation.system import ReformState, to_reform_state
from diagnostics.linear import LinearCoeffs, LinearState, epsilon_ell, epsilon_h, kappa
from utils.errors import NumericalError

logger = logging.getLogger(__name__)

DECAY_SLACK = 0.05
EQUIVALENCE_RTOL = 1e-10


class NotBlockLocalizedError(NumericalError):
    """Raised when a functional is evaluated on fields that are not Delta_j blocks."""
    code = "NOT_BLOCK_LOCALIZED"


class EpsTooLargeError(NumericalError):
    """Raised when the cross-term weight exceeds its admissible cap."""
    code = "EPS_TOO_LARGE"


class DecayViolatedError(NumericalError):
    """Raised when a block functional decays slower than the monitored bound."""
    code = "DECAY_VIOLATED"


def eps_cap(j: int, c: LinearCoeffs) -> float:
    if j <= 0:
        return min(5.0 * c.h5 / (24.0 * c.h3), 5.0 / 24.0)
    return min(5.0 * c.h5 / (144.0 * c.h3), 5.0 / 48.0)


def equivalence_bounds(j: int, c: LinearCoeffs) -> Tuple[float, float]:
    """(lower, upper) factors of ||(w_j, r_j, u_j)||^2 bracketing L_j^2."""
    lower = c.c1 ** 2 / 4.0 if j <= 0 else c.c1 ** 2 / 9.0
    return lower, 4.0 * c.c2 ** 2


def _weights(j: int, c: LinearCoeffs):
    if j <= 0:
        return c.h6 / c.h1, c.h5 / c.h3
    return c.total(6) / c.total(1), c.total(5) / c.total(3)


def lyapunov_block(j: int, w_j: Field, r_j: Field, u_j: VectorField, c: LinearCoeffs,
                   eps: float, check_support: bool = True) -> float:
    """
    Value of the block functional L_j.
    
    Args:
        j: Dyadic index
        w_j, r_j, u_j: Delta_j blocks of (w, r, u)
        c: Linear coefficients
        eps: Cross-term weight (eps_ell for j <= 0, eps_h for j > 0)
        check_support: Verify the inputs are localized in the j-th annulus
        
    Returns:
        L_j >= 0
        
    Raises:
        NotBlockLocalizedError: If an input is not supported in the annulus
        EpsTooLargeError: If eps exceeds its cap
    """
    cap = eps_cap(j, c)
    if eps > cap:
        raise EpsTooLargeError(f"eps = {eps:.3e} exceeds cap {cap:.3e} for block {j}")
    if check_support:
        for name, f in [("w", w_j), ("r", r_j)] + [(f"u{k}", comp) for k, comp in enumerate(u_j)]:
            if not is_block_localized(f, j):
                raise NotBlockLocalizedError(f"{name} is not localized in block {j}")

    weight_w, weight_r = _weights(j, c)
    cross_weight = eps if j <= 0 else eps * 2.0 ** (-2 * j)
    cross = u_j.dot(gradient(r_j)).samples
    density = (weight_w * w_j.samples ** 2 + weight_r * r_j.samples ** 2
               + np.sum(u_j.as_array() ** 2, axis=0) + 2.0 * cross_weight * cross)
    integral = w_j.grid.volume * float(np.mean(density))
    return math.sqrt(max(integral, 0.0))


@dataclass
class EnergyTrace:
    """Block functionals recorded along a run."""

    times: List[float] = field(default_factory=list)
    values: Dict[int, List[float]] = field(default_factory=dict)
    norms: Dict[int, List[float]] = field(default_factory=dict)
    kappa: float = 0.0
    eps_ell: float = 0.0
    eps_h: float = 0.0
    C1: float = 0.0
    C2: float = 0.0
    C3: float = 0.0
    damped_w_integral: List[float] = field(default_factory=list)
    velocity_integral: List[float] = field(default_factory=list)
    equivalence_violations: int = 0

    def rows(self):
        """CSV rows (t, j, L_j, bound) with bound = L_j(0) exp(-rate_j t)."""
        rows = []
        for j in sorted(self.values):
            rate = decay_rate(j, self)
            start = self.values[j][0]
            for t, value in zip(self.times, self.values[j]):
                rows.append((t, j, value, start * math.exp(-rate * t)))
        return rows


def decay_rate(j: int, trace: EnergyTrace) -> float:
    """Monitored rate kappa / (4 C2^2) * min(2^{2j}, 1)."""
    return trace.kappa / (4.0 * trace.C2 ** 2) * min(2.0 ** (2 * j), 1.0)


def _components(state, p: Optional[ModelParams]):
    if isinstance(state, LinearState):
        return state.w, state.r, state.u
    if isinstance(state, PhaseState):
        state = to_reform_state(state, p)
    if isinstance(state, ReformState):
        return state.w, state.r, state.u
    raise TypeError(f"Unsupported state type {type(state).__name__}")


class EnergyMonitor:
    """
    Observer recording L_j, block norms and damped-mode integrals.

    Phase states are mapped to (w, r, u) through the change of unknowns;
    linear and reformulated states are read directly.
    """

    def __init__(self, c: LinearCoeffs, p: Optional[ModelParams] = None,
                 s_damped: Optional[float] = None, s_velocity: Optional[float] = None):
        self.c = c
        self.p = p
        self.s_damped = s_damped
        self.s_velocity = s_velocity
        eps_l = epsilon_ell(c)
        self.trace = EnergyTrace(
            kappa=kappa(c, eps_l), eps_ell=eps_l, eps_h=epsilon_h(c),
            C1=c.c1, C2=c.c2, C3=c.c3,
        )
        self._last: Optional[Tuple[float, float, float]] = None

    def __call__(self, time: float, state) -> None:
        c, trace = self.c, self.trace
        w, r, u = _components(state, self.p)
        dim = w.grid.dim
        s_damped = dim / 2.0 - 1.0 if self.s_damped is None else self.s_damped
        s_velocity = dim / 2.0 if self.s_velocity is None else self.s_velocity

        w_blocks = decompose(w)
        r_blocks = decompose(r)
        u_blocks = [decompose(comp) for comp in u]
        trace.times.append(time)
        for j in w_blocks.blocks:
            w_j, r_j = w_blocks.blocks[j], r_blocks.blocks[j]
            u_j = VectorField(tuple(b.blocks[j] for b in u_blocks))
            eps = trace.eps_ell if j <= 0 else trace.eps_h
            value = lyapunov_block(j, w_j, r_j, u_j, c, eps, check_support=False)
            norm = math.sqrt(w_j.l2_norm() ** 2 + r_j.l2_norm() ** 2 + u_j.l2_norm() ** 2)
            lower, upper = equivalence_bounds(j, c)
            squared = value ** 2
            slack = EQUIVALENCE_RTOL * max(norm ** 2, 1e-300)
            if squared < lower * norm ** 2 - slack or squared > upper * norm ** 2 + slack:
                trace.equivalence_violations += 1
                logger.warning(f"Equivalence bounds violated for block {j} at t = {time:.4g}")
            trace.values.setdefault(j, []).append(value)
            trace.norms.setdefault(j, []).append(norm)

        damped = besov_norm(w, s_damped).total / c.nu
        velocity = sum(besov_norm(comp, s_velocity).total for comp in u)
        if self._last is None:
            trace.damped_w_integral.append(0.0)
            trace.velocity_integral.append(0.0)
        else:
            last_time, last_damped, last_velocity = self._last
            dt = time - last_time
            trace.damped_w_integral.append(trace.damped_w_integral[-1] + dt * last_damped)
            trace.velocity_integral.append(trace.velocity_integral[-1] + dt * last_velocity)
        self._last = (time, damped, velocity)


@dataclass
class DecayReport:
    worst_slack: float = 0.0
    per_j: Dict[int, Dict[str, float]] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        # NaN (no fitted rate) is not valid JSON
        per_j = {
            str(j): {key: (None if math.isnan(value) else value) for key, value in entry.items()}
            for j, entry in sorted(self.per_j.items())
        }
        return {"worst_slack": self.worst_slack, "per_j": per_j}


def _empirical_rate(times: np.ndarray, values: np.ndarray) -> float:
    """Least-squares slope of -log L_j over the second half of the record."""
    half = len(times) // 2
    t, v = times[half:], values[half:]
    positive = v > 0
    if positive.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(t[positive], np.log(v[positive]), 1)
    return float(-slope)


def monitor_decay(trace: EnergyTrace, c: LinearCoeffs, max_slack: float = DECAY_SLACK) -> DecayReport:
    """
    Compare each L_j(t) with L_j(0) exp(-kappa/(4 C2^2) min(2^{2j}, 1) t).
    
    Args:
        trace: Energy trace of a source-free, frozen-coefficient run
        c: Coefficients used for the run
        max_slack: Largest accepted relative excess over the bound
        
    Returns:
        DecayReport with per-block slack, monitored and fitted rates
        
    Raises:
        DecayViolatedError: If some block exceeds the bound by more than max_slack
    """
    times = np.asarray(trace.times)
    report = DecayReport()
    if not trace.values:
        return report
    reference = max(values[0] for values in trace.values.values())
    for j in sorted(trace.values):
        values = np.asarray(trace.values[j])
        rate = decay_rate(j, trace)
        entry = {"bound_rate": rate, "empirical_rate": float("nan"), "slack": 0.0}
        if values[0] > 1e-14 * max(reference, 1e-300):
            bound = values[0] * np.exp(-rate * times)
            entry["slack"] = float(max(np.max(values / bound) - 1.0, 0.0))
            entry["empirical_rate"] = _empirical_rate(times, values)
        report.per_j[j] = entry
        report.worst_slack = max(report.worst_slack, entry["slack"])

    if report.worst_slack > max_slack:
        raise DecayViolatedError(f"Block functional exceeds its decay bound by {report.worst_slack:.2%}")
    return report
