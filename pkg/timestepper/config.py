"""
Time-stepping configuration.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field as PydanticField


class StepConfig(BaseModel):
    """Controls of a time integration run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: float = PydanticField(0.01, gt=0.0)
    t_end: float = PydanticField(1.0, gt=0.0)
    cfl_safety: float = PydanticField(0.5, gt=0.0, le=1.0)
    scheme: Literal["imex_ark2", "strang_exact_relax"] = "imex_ark2"
    snapshot_every: int = PydanticField(10, ge=1)
    viscous_integrating_factor: bool = False

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))
