"""
Periodic grids for the pseudo-spectral solvers.

A GridSpec describes the torus [0, length)^dim sampled with points_per_axis
points per direction. Wavenumber tables are cached per grid.
"""

import math
import logging
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import fft as sfft
from pydantic import BaseModel, ConfigDict, Field as PydanticField, field_validator

logger = logging.getLogger(__name__)


class GridSpec(BaseModel):
    """Uniform periodic grid on [0, length)^dim."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dim: int = PydanticField(2, ge=1, le=3)
    points_per_axis: int = PydanticField(64, ge=16)
    length: float = PydanticField(2.0 * math.pi, gt=0.0)

    @field_validator("points_per_axis")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError(f"points_per_axis must be a power of two, got {value}")
        return value

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def spacing(self) -> float:
        return self.length / self.points_per_axis

    @property
    def volume(self) -> float:
        return self.length ** self.dim

    @property
    def fundamental(self) -> float:
        """Smallest nonzero wavenumber 2*pi/length."""
        return 2.0 * math.pi / self.length

    @property
    def dealias_cutoff(self) -> int:
        """Largest integer mode index kept by the 2/3 rule."""
        return self.points_per_axis // 3

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Meshgrid of sample coordinates (ij indexing)."""
        axis = np.arange(self.points_per_axis) * self.spacing
        return tuple(np.meshgrid(*([axis] * self.dim), indexing="ij"))

    def wavenumbers(self) -> Tuple[np.ndarray, ...]:
        """Derivative wavenumbers per axis, Nyquist entries zeroed."""
        return _wavenumber_tables(self.dim, self.points_per_axis, self.length)[0]

    def wavenumber_magnitude(self) -> np.ndarray:
        """|xi| over the full spectral grid, Nyquist included."""
        return _wavenumber_tables(self.dim, self.points_per_axis, self.length)[1]

    def wavenumber_squared(self) -> np.ndarray:
        """|xi|^2 built from the Nyquist-free derivative wavenumbers."""
        return _wavenumber_tables(self.dim, self.points_per_axis, self.length)[2]

    def nyquist_mask(self) -> np.ndarray:
        """True where no index sits on a Nyquist plane."""
        return _masks(self.dim, self.points_per_axis)[0]

    def dealias_mask(self) -> np.ndarray:
        """True on modes retained by the 2/3 truncation."""
        return _masks(self.dim, self.points_per_axis)[1]


@lru_cache(maxsize=32)
def _integer_modes(n: int) -> np.ndarray:
    return np.rint(sfft.fftfreq(n, d=1.0 / n)).astype(np.int64)


@lru_cache(maxsize=32)
def _wavenumber_tables(dim: int, n: int, length: float):
    modes = _integer_modes(n)
    scale = 2.0 * math.pi / length
    full = modes * scale
    derivative = np.where(np.abs(modes) == n // 2, 0.0, full)

    shape = (n,) * dim
    derivative_axes = []
    full_axes = []
    for axis in range(dim):
        view = [1] * dim
        view[axis] = n
        derivative_axes.append(np.broadcast_to(derivative.reshape(view), shape))
        full_axes.append(np.broadcast_to(full.reshape(view), shape))

    magnitude = np.sqrt(sum(k ** 2 for k in full_axes))
    squared = sum(k ** 2 for k in derivative_axes)
    for table in (magnitude, squared):
        table.setflags(write=False)
    logger.debug(f"Built wavenumber tables for dim={dim}, n={n}, length={length}")
    return tuple(derivative_axes), magnitude, squared


@lru_cache(maxsize=32)
def _masks(dim: int, n: int):
    modes = _integer_modes(n)
    shape = (n,) * dim
    not_nyquist = np.ones(shape, dtype=bool)
    retained = np.ones(shape, dtype=bool)
    for axis in range(dim):
        view = [1] * dim
        view[axis] = n
        axis_modes = modes.reshape(view)
        not_nyquist &= np.abs(axis_modes) != n // 2
        retained &= np.abs(axis_modes) <= n // 3
    not_nyquist.setflags(write=False)
    retained.setflags(write=False)
    return not_nyquist, retained
