"""
Scalar and vector fields on a periodic grid.

Fields are immutable values: samples are stored read-only and the spectrum
is computed lazily with forward normalization, so that the coefficient of
the constant mode equals the spatial mean and
sum(|spectrum|^2) == mean(samples^2).
"""

import math
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Sequence, Tuple, Union

import numpy as np
from scipy import fft as sfft

from spectral.grid import GridSpec
from utils.errors import NumericalError

logger = logging.getLogger(__name__)

Scalar = Union[int, float]


class SpectralError(NumericalError):
    """Custom exception for spectral-core errors."""
    code = "SPECTRAL_ERROR"


class GridMismatchError(SpectralError):
    """Raised when fields living on different grids are combined."""
    code = "GRID_MISMATCH"


def forward_transform(samples: np.ndarray) -> np.ndarray:
    return sfft.fftn(samples, norm="forward")


def inverse_transform(spectrum: np.ndarray) -> np.ndarray:
    return sfft.ifftn(spectrum, norm="forward").real


@dataclass(frozen=True, eq=False)
class Field:
    """Real scalar field sampled on a GridSpec."""

    # numpy operands defer to the reflected Field operators
    __array_ufunc__ = None

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        values = np.array(self.samples, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise SpectralError(
                f"Samples of shape {values.shape} do not match grid shape {self.grid.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "samples", values)

    # construction -----------------------------------------------------------

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "Field":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "Field":
        return cls.constant(grid, 0.0)

    @classmethod
    def from_function(cls, grid: GridSpec, fn: Callable[..., np.ndarray]) -> "Field":
        """Sample fn(x, y, ...) on the grid coordinates."""
        return cls(grid, fn(*grid.coordinates()))

    @classmethod
    def from_spectrum(cls, grid: GridSpec, spectrum: np.ndarray) -> "Field":
        return cls(grid, inverse_transform(spectrum))

    # spectral view ----------------------------------------------------------

    @cached_property
    def spectrum(self) -> np.ndarray:
        coefficients = forward_transform(self.samples)
        coefficients.setflags(write=False)
        return coefficients

    # reductions -------------------------------------------------------------

    def mean(self) -> float:
        return float(self.samples.mean())

    def l2_norm(self) -> float:
        """L2 norm on the torus: sqrt(volume * mean(f^2))."""
        return math.sqrt(self.grid.volume * float(np.mean(self.samples ** 2)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def min(self) -> float:
        return float(self.samples.min())

    def max(self) -> float:
        return float(self.samples.max())

    # pointwise algebra (no dealiasing) --------------------------------------

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "Field":
        return Field(self.grid, fn(self.samples))

    def _operand(self, other) -> np.ndarray:
        if isinstance(other, Field):
            if other.grid != self.grid:
                raise GridMismatchError(f"Grid mismatch: {self.grid} vs {other.grid}")
            return other.samples
        return other

    def __add__(self, other) -> "Field":
        return Field(self.grid, self.samples + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other) -> "Field":
        return Field(self.grid, self.samples - self._operand(other))

    def __rsub__(self, other) -> "Field":
        return Field(self.grid, self._operand(other) - self.samples)

    def __mul__(self, other) -> "Field":
        return Field(self.grid, self.samples * self._operand(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Field":
        return Field(self.grid, self.samples / self._operand(other))

    def __rtruediv__(self, other) -> "Field":
        return Field(self.grid, self._operand(other) / self.samples)

    def __pow__(self, exponent: Scalar) -> "Field":
        return Field(self.grid, self.samples ** exponent)

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.samples)

    def __repr__(self) -> str:
        return (f"Field(dim={self.grid.dim}, n={self.grid.points_per_axis}, "
                f"mean={self.mean():.6g}, sup={self.sup_norm():.6g})")


@dataclass(frozen=True, eq=False)
class VectorField:
    """dim scalar components sharing one grid."""

    __array_ufunc__ = None

    components: Tuple[Field, ...]

    def __post_init__(self):
        components = tuple(self.components)
        if not components:
            raise SpectralError("VectorField needs at least one component")
        grid = components[0].grid
        if any(c.grid != grid for c in components):
            raise GridMismatchError("All VectorField components must share the same grid")
        if len(components) != grid.dim:
            raise SpectralError(
                f"VectorField on a {grid.dim}D grid needs {grid.dim} components, got {len(components)}"
            )
        object.__setattr__(self, "components", components)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "VectorField":
        return cls(tuple(Field.zeros(grid) for _ in range(grid.dim)))

    @classmethod
    def from_arrays(cls, grid: GridSpec, arrays: Sequence[np.ndarray]) -> "VectorField":
        return cls(tuple(Field(grid, a) for a in arrays))

    @property
    def grid(self) -> GridSpec:
        return self.components[0].grid

    def __iter__(self) -> Iterator[Field]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, index: int) -> Field:
        return self.components[index]

    def as_array(self) -> np.ndarray:
        return np.stack([c.samples for c in self.components])

    def dot(self, other: "VectorField") -> Field:
        return Field(self.grid, np.sum(self.as_array() * other.as_array(), axis=0))

    def magnitude(self) -> Field:
        return Field(self.grid, np.sqrt(np.sum(self.as_array() ** 2, axis=0)))

    def l2_norm(self) -> float:
        return math.sqrt(sum(c.l2_norm() ** 2 for c in self.components))

    def sup_norm(self) -> float:
        return float(np.max(self.magnitude().samples))

    def map(self, fn: Callable[[Field], Field]) -> "VectorField":
        return VectorField(tuple(fn(c) for c in self.components))

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a - b for a, b in zip(self.components, other.components)))

    def __mul__(self, other) -> "VectorField":
        return VectorField(tuple(c * other for c in self.components))

    __rmul__ = __mul__

    def __neg__(self) -> "VectorField":
        return VectorField(tuple(-c for c in self.components))
