"""
Smooth dyadic bump for the homogeneous Littlewood-Paley decomposition.

chi is a radial cutoff equal to 1 on |xi| <= 5/6 and 0 on |xi| >= 6/5,
built from the exp(-1/t) mollifier. phi(xi) = chi(xi/2) - chi(xi) is then
supported in the annulus 5/6 <= |xi| <= 12/5 and the dyadic sum telescopes,
so the partition of unity holds up to rounding.
"""

from dataclasses import dataclass

import numpy as np

INNER_RADIUS = 5.0 / 6.0
OUTER_RADIUS = 12.0 / 5.0
_CUTOFF_START = 5.0 / 6.0
_CUTOFF_END = 6.0 / 5.0


def _mollifier(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    positive = t > 0
    out[positive] = np.exp(-1.0 / t[positive])
    return out


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    left = _mollifier(t)
    right = _mollifier(1.0 - np.asarray(t, dtype=np.float64))
    return left / (left + right)


@dataclass(frozen=True)
class DyadicBump:
    """Radial profile pair (chi, phi) of the decomposition."""

    cutoff_start: float = _CUTOFF_START
    cutoff_end: float = _CUTOFF_END

    @property
    def support(self):
        return (self.cutoff_start, 2.0 * self.cutoff_end)

    def chi(self, radius: np.ndarray) -> np.ndarray:
        radius = np.abs(np.asarray(radius, dtype=np.float64))
        return smooth_step((self.cutoff_end - radius) / (self.cutoff_end - self.cutoff_start))

    def phi(self, radius: np.ndarray) -> np.ndarray:
        return self.chi(np.asarray(radius) / 2.0) - self.chi(radius)

    def block_multiplier(self, magnitude: np.ndarray, j: int) -> np.ndarray:
        """phi(2^{-j} |xi|) on a wavenumber table."""
        return self.phi(magnitude * 2.0 ** (-j))

    def partition_residual(self, magnitude: np.ndarray, j_min: int, j_max: int) -> float:
        """max |sum_j phi(2^{-j} xi) - 1| over the nonzero entries of magnitude."""
        nonzero = magnitude[magnitude > 0]
        total = sum(self.block_multiplier(nonzero, j) for j in range(j_min, j_max + 1))
        return float(np.max(np.abs(total - 1.0))) if nonzero.size else 0.0


DEFAULT_BUMP = DyadicBump()
