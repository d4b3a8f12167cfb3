"""
Besov and Chemin-Lerner norms built on the dyadic decomposition.

Norms use p = 2 and third index 1: 2^{js} ||Delta_j f||_{L2} summed over j.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Union

import numpy as np

from spectral.fields import Field
from spectral.operators import gradient
from littlewood_paley.bump import OUTER_RADIUS
from littlewood_paley.decomposition import decompose
from utils.errors import NumericalError

logger = logging.getLogger(__name__)

TimeExponent = Union[int, float, str]


class EmptyHistoryError(NumericalError):
    """Raised when a time-norm is requested on fewer than two samples."""
    code = "EMPTY_HISTORY"


@dataclass
class BesovReport:
    """Per-block accounting of a Besov norm; j_min/j_max record the truncation."""

    s: float
    per_j: Dict[int, float] = field(default_factory=dict)
    block_l2: Dict[int, float] = field(default_factory=dict)
    total: float = 0.0
    low: float = 0.0
    high: float = 0.0
    j_min: int = 0
    j_max: int = 0

    def rows(self):
        """CSV rows (j, block_l2, weighted)."""
        return [(j, self.block_l2[j], self.per_j[j]) for j in sorted(self.per_j)]

    def to_dict(self) -> Dict:
        return {
            "s": self.s,
            "total": self.total,
            "low": self.low,
            "high": self.high,
            "j_min": self.j_min,
            "j_max": self.j_max,
            "per_j": {str(j): v for j, v in sorted(self.per_j.items())},
        }


def besov_norm(f: Field, s: float) -> BesovReport:
    """
    Homogeneous Besov norm ||f||_{B^s_{2,1}}.
    
    Args:
        f: Field
        s: Regularity index (may be negative)
        
    Returns:
        BesovReport with the weighted block norms and low/high sums
    """
    decomposition = decompose(f)
    block_l2 = {j: b.l2_norm() for j, b in decomposition.blocks.items()}
    per_j = {j: 2.0 ** (j * s) * v for j, v in block_l2.items()}
    return BesovReport(
        s=s,
        per_j=per_j,
        block_l2=block_l2,
        total=sum(per_j.values()),
        low=sum(v for j, v in per_j.items() if j <= 0),
        high=sum(v for j, v in per_j.items() if j >= -1),
        j_min=decomposition.j_min,
        j_max=decomposition.j_max,
    )


def _time_norm(values: np.ndarray, rho: TimeExponent, steps: np.ndarray) -> float:
    if rho in ("inf", math.inf):
        return float(values.max())
    rho = float(rho)
    # left rectangle rule on the sample times
    return float(np.sum(steps * values[:-1] ** rho) ** (1.0 / rho))


def _time_steps(count: int, dt: Optional[float], times: Optional[Sequence[float]]) -> np.ndarray:
    if (dt is None) == (times is None):
        raise ValueError("Give exactly one of dt and times")
    if times is None:
        return np.full(count - 1, float(dt))
    stamps = np.asarray(times, dtype=np.float64)
    if stamps.shape != (count,):
        raise ValueError(f"Got {stamps.size} time stamps for {count} samples")
    steps = np.diff(stamps)
    if np.any(steps <= 0.0):
        raise ValueError("Time stamps must increase strictly")
    return steps


def chemin_lerner_norm(history: Sequence[Field], s: float, rho: TimeExponent,
                       dt: Optional[float] = None, times: Optional[Sequence[float]] = None) -> float:
    """
    Chemin-Lerner norm: time L^rho per block, then the weighted l1 sum.
    
    Args:
        history: Fields sampled in time
        s: Regularity index
        rho: 1, 2 or "inf"
        dt: Uniform time step between samples
        times: Sample times, for histories with uneven spacing (such as
            Trajectory.times); exclusive with dt
        
    Returns:
        The norm over the sampled horizon
        
    Raises:
        EmptyHistoryError: If fewer than two samples are given
        ValueError: On an unsupported rho or inconsistent dt / times
    """
    if len(history) < 2:
        raise EmptyHistoryError(f"Chemin-Lerner norm needs at least 2 samples, got {len(history)}")
    if rho not in (1, 2, "inf", math.inf):
        raise ValueError(f"Unsupported time exponent {rho}")
    steps = _time_steps(len(history), dt, times)

    decompositions = [decompose(f) for f in history]
    total = 0.0
    for j in decompositions[0].blocks:
        values = np.array([d.blocks[j].l2_norm() for d in decompositions])
        total += 2.0 ** (j * s) * _time_norm(values, rho, steps)
    return total


def bernstein_check(f: Field) -> Dict[int, bool]:
    """Per block: ||grad Delta_j f|| <= (12/5) 2^j ||Delta_j f||."""
    results = {}
    for j, block in decompose(f).blocks.items():
        lhs = gradient(block).l2_norm()
        rhs = OUTER_RADIUS * 2.0 ** j * block.l2_norm()
        results[j] = lhs <= rhs * (1 + 1e-12) + 1e-300
    return results
