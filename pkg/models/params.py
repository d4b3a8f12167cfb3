"""
Physical parameters of the damped two-phase system.
"""

import logging
from typing import Any, Dict

from pydantic import BaseModel, ConfigDict, Field as PydanticField, model_validator

logger = logging.getLogger(__name__)

PRESSURE_EQUILIBRIUM_TOL = 1e-12


class ModelParams(BaseModel):
    """
    Constants of the barotropic two-phase model.

    The JSON key ``lambda`` is accepted for the second Lame coefficient.
    nu = 2*mu + lambda doubles as the pressure-relaxation time.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    gamma_plus: float = 2.0
    gamma_minus: float = 1.5
    A_plus: float = PydanticField(1.0, gt=0.0)
    A_minus: float = PydanticField(1.0, gt=0.0)
    mu: float = PydanticField(0.1 / 3.0, ge=0.0)
    lam: float = PydanticField(0.1 / 3.0, alias="lambda")
    eta: float = 1.0
    alpha_bar_plus: float = PydanticField(0.5, gt=0.0, lt=1.0)
    rho_bar_plus: float = PydanticField(1.0, gt=0.0)
    rho_bar_minus: float = PydanticField(1.0, gt=0.0)

    @model_validator(mode="after")
    def _check_constraints(self) -> "ModelParams":
        if not self.gamma_plus > self.gamma_minus >= 1.0:
            raise ValueError(
                f"Need gamma_plus > gamma_minus >= 1, got {self.gamma_plus}, {self.gamma_minus}"
            )
        if self.mu + self.lam < 0:
            raise ValueError(f"Need mu + lambda >= 0, got {self.mu + self.lam}")
        if not 0.0 < self.nu <= 1.0:
            raise ValueError(f"Need nu = 2*mu + lambda in (0, 1], got {self.nu}")
        if self.eta < 1.0:
            raise ValueError(f"Need eta >= 1, got {self.eta}")

        p_plus = self.A_plus * self.rho_bar_plus ** self.gamma_plus
        p_minus = self.A_minus * self.rho_bar_minus ** self.gamma_minus
        if abs(p_plus - p_minus) > PRESSURE_EQUILIBRIUM_TOL * max(1.0, abs(p_plus)):
            raise ValueError(
                f"Reference pressures differ: A+ rho+^g+ = {p_plus}, A- rho-^g- = {p_minus}"
            )
        return self

    @property
    def nu(self) -> float:
        return 2.0 * self.mu + self.lam

    @property
    def lam_plus_mu(self) -> float:
        return self.lam + self.mu

    @property
    def alpha_bar_minus(self) -> float:
        return 1.0 - self.alpha_bar_plus

    @property
    def pressure_bar(self) -> float:
        return self.A_plus * self.rho_bar_plus ** self.gamma_plus

    @property
    def rho_bar(self) -> float:
        return self.alpha_bar_plus * self.rho_bar_plus + self.alpha_bar_minus * self.rho_bar_minus

    @property
    def mass_fraction_bar(self) -> float:
        return self.alpha_bar_plus * self.rho_bar_plus / self.rho_bar

    def phase_constants(self, phase: str):
        """(A, gamma) of phase '+' or '-'."""
        if phase == "+":
            return self.A_plus, self.gamma_plus
        if phase == "-":
            return self.A_minus, self.gamma_minus
        raise ValueError(f"Unknown phase '{phase}', expected '+' or '-'")

    def with_nu(self, nu: float) -> "ModelParams":
        """Copy with mu and lambda scaled so that 2*mu + lambda == nu."""
        scale = nu / self.nu
        data: Dict[str, Any] = self.model_dump()
        data.update(mu=self.mu * scale, lam=self.lam * scale)
        return ModelParams.model_validate(data)
