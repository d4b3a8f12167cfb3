"""
Dyadic block decomposition of periodic fields.

The mean (xi = 0) mode belongs to no block and is carried separately; it is
assigned to the low-frequency part of every split.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from spectral.fields import Field
from spectral.grid import GridSpec
from littlewood_paley.bump import DEFAULT_BUMP, DyadicBump, INNER_RADIUS, OUTER_RADIUS
from utils.errors import NumericalError

logger = logging.getLogger(__name__)


class GridTooCoarseError(NumericalError):
    """Raised when the grid supports fewer than four dyadic blocks."""
    code = "GRID_TOO_COARSE"


def block_range(grid: GridSpec) -> Tuple[int, int]:
    """
    Dyadic indices needed to cover every nonzero mode of the grid.
    
    Args:
        grid: Periodic grid
        
    Returns:
        (j_min, j_max) such that the partition of unity is exact on the grid
    """
    magnitude = grid.wavenumber_magnitude()
    xi_min = grid.fundamental
    xi_max = float(magnitude.max())
    j_min = math.floor(math.log2(xi_min * INNER_RADIUS))
    j_max = math.ceil(math.log2(xi_max * 6.0 / 5.0)) - 1
    return j_min, j_max


@dataclass(frozen=True, eq=False)
class DyadicBlocks:
    """Blocks Delta_j f for j_min <= j <= j_max plus the mean."""

    grid: GridSpec
    j_min: int
    j_max: int
    blocks: Dict[int, Field] = field(default_factory=dict)
    mean_mode: float = 0.0

    def reconstruct(self) -> Field:
        total = Field.constant(self.grid, self.mean_mode)
        for j in sorted(self.blocks):
            total = total + self.blocks[j]
        return total

    def partial_sum(self, upper: int, with_mean: bool = True) -> Field:
        """Sum of blocks with j <= upper (plus the mean if requested)."""
        total = Field.constant(self.grid, self.mean_mode if with_mean else 0.0)
        for j, block in self.blocks.items():
            if j <= upper:
                total = total + block
        return total


def decompose(f: Field, bump: DyadicBump = DEFAULT_BUMP) -> DyadicBlocks:
    """
    Split a field into Littlewood-Paley blocks.
    
    Args:
        f: Field on a power-of-two grid
        bump: Dyadic profile
        
    Returns:
        DyadicBlocks whose blocks plus mean reconstruct f
        
    Raises:
        GridTooCoarseError: If j_max - j_min < 3
    """
    grid = f.grid
    j_min, j_max = block_range(grid)
    if j_max - j_min < 3:
        raise GridTooCoarseError(
            f"Grid with {grid.points_per_axis} points per axis only supports blocks {j_min}..{j_max}"
        )

    magnitude = grid.wavenumber_magnitude()
    spectrum = f.spectrum
    blocks = {
        j: Field.from_spectrum(grid, bump.block_multiplier(magnitude, j) * spectrum)
        for j in range(j_min, j_max + 1)
    }
    return DyadicBlocks(grid=grid, j_min=j_min, j_max=j_max, blocks=blocks,
                        mean_mode=float(spectrum.flat[0].real))


def low_high_split(f: Field) -> Tuple[Field, Field]:
    """Low part sum_{j <= -1} Delta_j f + mean, and the remainder."""
    low = decompose(f).partial_sum(-1)
    return low, f - low


def low_pass(f: Field, n: int) -> Field:
    """Truncated sum S_n f = sum_{j <= n} Delta_j f + mean."""
    return decompose(f).partial_sum(n)


def is_block_localized(f: Field, j: int, rtol: float = 1e-12) -> bool:
    """True if the spectrum of f sits in 5/6 2^j <= |xi| <= 12/5 2^j."""
    magnitude = f.grid.wavenumber_magnitude()
    scale = 2.0 ** j
    outside = (magnitude < INNER_RADIUS * scale * (1 - 1e-12)) | (magnitude > OUTER_RADIUS * scale * (1 + 1e-12))
    energy = np.abs(f.spectrum) ** 2
    total = float(energy.sum())
    if total == 0.0:
        return True
    return float(energy[outside].sum()) <= rtol * total
