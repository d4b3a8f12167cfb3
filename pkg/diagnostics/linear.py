"""
Frozen linear system used to validate the energy functionals:

    w_t + v.grad w + (h1+H1) div u + (h2+H2) w / nu = 0
    r_t + v.grad r + (h3+H3) div u = 0
    u_t + v.grad u - (h4+H4) A u + eta u + (h5+H5) grad r + (h6+H6) grad w = 0

Also holds the constants eps_ell, eps_h, kappa, C1..C3 built from h1..h6.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm
from pydantic import BaseModel, ConfigDict, Field as PydanticField, model_validator

from spectral.fields import Field, VectorField
from models.params import ModelParams
from reformulation.system import BarConstants

logger = logging.getLogger(__name__)


class LinearCoeffs(BaseModel):
    """Constant parts h1..h6 of the linear system, with optional variable parts H1..H6."""

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    h1: float = PydanticField(1.0, gt=0.0)
    h2: float = PydanticField(1.0, gt=0.0)
    h3: float = PydanticField(1.0, gt=0.0)
    h4: float = PydanticField(1.0, gt=0.0)
    h5: float = PydanticField(1.0, gt=0.0)
    h6: float = PydanticField(1.0, gt=0.0)
    eta: float = PydanticField(1.0, ge=1.0)
    nu: float = PydanticField(0.01, gt=0.0, le=1.0)
    mu: Optional[float] = PydanticField(None, ge=0.0)
    lam: Optional[float] = None
    H1: Optional[Field] = None
    H2: Optional[Field] = None
    H3: Optional[Field] = None
    H4: Optional[Field] = None
    H5: Optional[Field] = None
    H6: Optional[Field] = None

    @model_validator(mode="after")
    def _check_variable_parts(self) -> "LinearCoeffs":
        for index in range(1, 7):
            variable = getattr(self, f"H{index}")
            bound = 0.5 * getattr(self, f"h{index}")
            if variable is not None and variable.sup_norm() > bound:
                raise ValueError(f"||H{index}||_inf = {variable.sup_norm():.3e} exceeds h{index}/2 = {bound:.3e}")
        return self

    @property
    def lame_mu(self) -> float:
        return self.nu / 3.0 if self.mu is None else self.mu

    @property
    def lame_lam(self) -> float:
        return self.nu / 3.0 if self.lam is None else self.lam

    @property
    def has_variable_parts(self) -> bool:
        return any(getattr(self, f"H{i}") is not None for i in range(1, 7))

    def total(self, index: int):
        """h_i + H_i as a float or a sample array."""
        constant = getattr(self, f"h{index}")
        variable = getattr(self, f"H{index}")
        return constant if variable is None else constant + variable.samples

    @classmethod
    def from_model(cls, p: ModelParams) -> "LinearCoeffs":
        """Constants of the linearization of the reformulated system at equilibrium."""
        bars = BarConstants.from_params(p)
        return cls(
            h1=bars.F1, h2=bars.F2, h3=bars.F3, h4=bars.F0, h5=bars.F0,
            h6=(p.gamma_plus - p.gamma_minus) * bars.F0,
            eta=p.eta, nu=p.nu, mu=p.mu, lam=p.lam,
        )

    # constants of the energy functionals --------------------------------

    @property
    def c1(self) -> float:
        return min(self.h6 / self.h1, self.h5 / self.h3, 1.0)

    @property
    def c2(self) -> float:
        return max(self.h6 / self.h1, self.h5 / self.h3, 1.0)

    @property
    def c3(self) -> float:
        return 6.0 * (self.h1 + self.h6) / self.h1 ** 2 + 6.0 * (self.h5 + self.h3) / self.h3 ** 2


def _epsilon_candidates(c: LinearCoeffs):
    return (
        c.h5 / c.h3,
        1.0,
        c.h2 * c.h5 / (c.h1 * c.h6 * c.nu),
        c.h5 * c.eta / (c.h3 * c.h5 + c.eta ** 2),
        c.h5 / (c.h4 * c.nu),
    )


def epsilon_ell(c: LinearCoeffs) -> float:
    """Cross-term weight of the low-frequency functional."""
    return min(_epsilon_candidates(c)) / 192.0


def epsilon_h(c: LinearCoeffs) -> float:
    """Cross-term weight of the high-frequency functional (eps_ell / 16)."""
    return min(_epsilon_candidates(c)) / 3072.0


def kappa(c: LinearCoeffs, eps_ell: Optional[float] = None) -> float:
    """Damping constant min{h2 h6/(h1 nu), h5 eps_ell, eta} / 256."""
    eps_ell = epsilon_ell(c) if eps_ell is None else eps_ell
    return min(c.h2 * c.h6 / (c.h1 * c.nu), c.h5 * eps_ell, c.eta) / 256.0


@dataclass(frozen=True, eq=False)
class LinearState:
    """Unknowns (w, r, u) of the linear system."""

    w: Field
    r: Field
    u: VectorField

    @property
    def grid(self):
        return self.w.grid

    def fields(self):
        return (self.w, self.r) + tuple(self.u)

    @classmethod
    def field_names(cls, dim: int):
        return ("w", "r") + tuple(f"u{k}" for k in range(dim))


def _mode_matrix(c: LinearCoeffs, magnitude: float) -> np.ndarray:
    nu_lame = 2.0 * c.lame_mu + c.lame_lam
    return np.array([
        [-c.h2 / c.nu, 0.0, -1j * c.h1 * magnitude],
        [0.0, 0.0, -1j * c.h3 * magnitude],
        [-1j * c.h6 * magnitude, -1j * c.h5 * magnitude, -(c.h4 * nu_lame * magnitude ** 2 + c.eta)],
    ], dtype=np.complex128)


def propagate_linear_exact(state: LinearState, c: LinearCoeffs, t: float) -> LinearState:
    """
    Exact solution of the constant-coefficient linear system at time t.
    
    Each Fourier mode evolves by the matrix exponential of the 3x3 block
    coupling (w, r, longitudinal u); the transverse velocity decays at rate
    h4*mu*|xi|^2 + eta.
    
    Args:
        state: Initial linear state
        c: Coefficients without variable parts
        t: Elapsed time
        
    Returns:
        LinearState at time t
        
    Raises:
        ValueError: If variable parts are present
    """
    if c.has_variable_parts:
        raise ValueError("Exact propagation only applies to constant coefficients")

    grid = state.grid
    ks = grid.wavenumbers()
    k2 = grid.wavenumber_squared()
    magnitude = np.sqrt(k2)
    unique, inverse = np.unique(np.round(magnitude, 12), return_inverse=True)
    inverse = inverse.reshape(magnitude.shape)
    propagators = np.stack([expm(_mode_matrix(c, m) * t) for m in unique])
    blocks = propagators[inverse]

    safe = np.where(magnitude > 0, magnitude, 1.0)
    u_hats = [comp.spectrum for comp in state.u]
    u_long = np.where(magnitude > 0, sum(k * uh for k, uh in zip(ks, u_hats)) / safe, 0.0)
    vector = np.stack([state.w.spectrum, state.r.spectrum, u_long], axis=-1)
    evolved = np.einsum("...ij,...j->...i", blocks, vector)

    transverse_decay = np.exp(-(c.h4 * c.lame_mu * k2 + c.eta) * t)
    components = []
    for k, uh in zip(ks, u_hats):
        direction = np.where(magnitude > 0, k / safe, 0.0)
        transverse = uh - direction * u_long
        components.append(Field.from_spectrum(grid, direction * evolved[..., 2] + transverse_decay * transverse))

    return LinearState(
        w=Field.from_spectrum(grid, evolved[..., 0]),
        r=Field.from_spectrum(grid, evolved[..., 1]),
        u=VectorField(tuple(components)),
    )
