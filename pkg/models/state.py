"""
State containers for the physical-variable systems.
"""

from dataclasses import dataclass

from spectral.fields import Field, VectorField
from spectral.grid import GridSpec


@dataclass(frozen=True, eq=False)
class PhaseState:
    """Unknowns (alpha_plus, rho_plus, rho_minus, u); alpha_minus is derived."""

    alpha_plus: Field
    rho_plus: Field
    rho_minus: Field
    u: VectorField

    @property
    def grid(self) -> GridSpec:
        return self.alpha_plus.grid

    @property
    def alpha_minus(self) -> Field:
        return 1.0 - self.alpha_plus

    def fields(self):
        return (self.alpha_plus, self.rho_plus, self.rho_minus) + tuple(self.u)

    @classmethod
    def field_names(cls, dim: int):
        return ("alpha_plus", "rho_plus", "rho_minus") + tuple(f"u{k}" for k in range(dim))


@dataclass(frozen=True, eq=False)
class PhaseTendency:
    """Time derivatives of (alpha_plus, rho_plus, rho_minus, u)."""

    alpha_plus: Field
    rho_plus: Field
    rho_minus: Field
    u: VectorField


@dataclass(frozen=True, eq=False)
class KapilaTendency:
    """Time derivatives of (alpha_plus, P, u) for the relaxed system."""

    alpha_plus: Field
    pressure: Field
    u: VectorField


@dataclass(frozen=True, eq=False)
class GammaCoeffs:
    gamma1: Field
    gamma2: Field
    gamma3: Field
    gamma4: Field
