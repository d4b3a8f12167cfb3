"""
Spectral-core package.

Periodic grids, immutable fields, Fourier differential operators including
the Lame operator, and 2/3-rule dealiased products.
"""

from spectral.grid import GridSpec
from spectral.fields import (
    Field,
    VectorField,
    SpectralError,
    GridMismatchError,
    forward_transform,
    inverse_transform
)
from spectral.operators import (
    partial,
    gradient,
    divergence,
    laplacian,
    lame_apply,
    lame_exponential,
    dealias,
    dealiased_product,
    advection
)

__all__ = [
    'GridSpec',
    'Field',
    'VectorField',
    'SpectralError',
    'GridMismatchError',
    'forward_transform',
    'inverse_transform',
    'partial',
    'gradient',
    'divergence',
    'laplacian',
    'lame_apply',
    'lame_exponential',
    'dealias',
    'dealiased_product',
    'advection'
]
