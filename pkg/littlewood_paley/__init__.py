"""
Littlewood-Paley package.

Dyadic decomposition, low/high splitting and Besov/Chemin-Lerner norms.
"""

from littlewood_paley.bump import DyadicBump, DEFAULT_BUMP, smooth_step
from littlewood_paley.decomposition import (
    DyadicBlocks,
    GridTooCoarseError,
    block_range,
    decompose,
    low_high_split,
    low_pass,
    is_block_localized
)
from littlewood_paley.norms import (
    BesovReport,
    EmptyHistoryError,
    besov_norm,
    chemin_lerner_norm,
    bernstein_check
)

__all__ = [
    'DyadicBump',
    'DEFAULT_BUMP',
    'smooth_step',
    'DyadicBlocks',
    'GridTooCoarseError',
    'block_range',
    'decompose',
    'low_high_split',
    'low_pass',
    'is_block_localized',
    'BesovReport',
    'EmptyHistoryError',
    'besov_norm',
    'chemin_lerner_norm',
    'bernstein_check'
]
