"""
Run configuration documents for the experiment harness.

A run configuration is a JSON document validated by the pydantic models
below. Unknown keys are rejected at every level.
"""

import logging
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field as PydanticField, ValidationError, model_validator

from config import LAB_CONFIG
from diagnostics.linear import LinearCoeffs
from models.params import ModelParams
from spectral.grid import GridSpec
from timestepper.config import StepConfig
from utils.errors import ConfigError
from utils.file_utils import FileUtilsError, canonical_hash, read_json_file, validate_file_type

logger = logging.getLogger(__name__)

DEFAULT_NU_VALUES = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
CONFIG_EXTENSIONS = [".json"]


class ConfigInvalidError(ConfigError):
    """Raised when a run configuration fails validation."""
    code = "CONFIG_INVALID"


class InitialDataConfig(BaseModel):
    """Seeded band-limited perturbation of the constant equilibrium."""

    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    amplitude: float = PydanticField(1e-2, ge=0.0)
    band: Tuple[int, int] = (1, 4)
    well_prepared: bool = True
    low_pass_j: Optional[int] = None

    @model_validator(mode="after")
    def _check_band(self) -> "InitialDataConfig":
        k_lo, k_hi = self.band
        if not 1 <= k_lo <= k_hi:
            raise ValueError(f"Need 1 <= k_lo <= k_hi, got band {list(self.band)}")
        return self


class RateStudyConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nu_values: List[float] = PydanticField(default_factory=lambda: list(DEFAULT_NU_VALUES))
    workers: int = PydanticField(LAB_CONFIG["workers"], ge=1)
    snapshot_every: int = PydanticField(5, ge=1)
    # relaxing runs start sqrt(nu) * discrepancy away from the relaxed data
    discrepancy: float = PydanticField(0.1, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_values(self) -> "RateStudyConfig":
        if any(not 0.0 < nu <= 1.0 for nu in self.nu_values):
            raise ValueError(f"Every nu must lie in (0, 1], got {self.nu_values}")
        if len(set(self.nu_values)) != len(self.nu_values):
            raise ValueError("nu_values contains duplicates")
        return self


class EnergyConfig(BaseModel):
    """Constants of the frozen linear system driven by energy-monitor."""

    model_config = ConfigDict(extra="forbid")

    h1: float = PydanticField(1.0, gt=0.0)
    h2: float = PydanticField(1.0, gt=0.0)
    h3: float = PydanticField(1.0, gt=0.0)
    h4: float = PydanticField(1.0, gt=0.0)
    h5: float = PydanticField(1.0, gt=0.0)
    h6: float = PydanticField(1.0, gt=0.0)
    eta: float = PydanticField(1.0, ge=1.0)
    nu: float = PydanticField(0.01, gt=0.0, le=1.0)

    def to_coeffs(self) -> LinearCoeffs:
        return LinearCoeffs(**self.model_dump())


class ReformCheckConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_points: int = PydanticField(10_000, ge=1)


class LpAnalyzeConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    s: Optional[float] = None


class RunConfig(BaseModel):
    """Complete description of one harness run."""

    model_config = ConfigDict(extra="forbid")

    grid: GridSpec = PydanticField(default_factory=GridSpec)
    model: ModelParams = PydanticField(default_factory=ModelParams)
    step: StepConfig = PydanticField(default_factory=StepConfig)
    initial_data: InitialDataConfig = PydanticField(default_factory=InitialDataConfig)
    observers: List[Literal["energy", "pressure_gap", "conservation"]] = PydanticField(default_factory=list)
    output_dir: str = LAB_CONFIG["output_dir"]
    system: Literal["bn", "kapila", "reform"] = "bn"
    inversion_radius: float = PydanticField(LAB_CONFIG["inversion_radius"], gt=0.0)
    rate_study: RateStudyConfig = PydanticField(default_factory=RateStudyConfig)
    energy: Optional[EnergyConfig] = None
    reform_check: ReformCheckConfig = PydanticField(default_factory=ReformCheckConfig)
    lp_analyze: LpAnalyzeConfig = PydanticField(default_factory=LpAnalyzeConfig)

    @model_validator(mode="after")
    def _check_amplitude(self) -> "RunConfig":
        limit = self.inversion_radius / 4.0
        if self.initial_data.amplitude > limit:
            raise ValueError(
                f"amplitude {self.initial_data.amplitude} exceeds inversion_radius / 4 = {limit}"
            )
        k_hi = self.initial_data.band[1]
        if k_hi > self.grid.dealias_cutoff:
            raise ValueError(
                f"band upper edge {k_hi} exceeds the dealiasing cutoff {self.grid.dealias_cutoff}"
            )
        return self

    def to_json_dict(self) -> Dict[str, Any]:
        """JSON-ready dump using the documented key names."""
        return self.model_dump(mode="json", by_alias=True)

    def config_hash(self) -> str:
        return canonical_hash(self.to_json_dict())


def parse_run_config(data: Dict[str, Any]) -> RunConfig:
    """
    Validate a configuration tree.

    Args:
        data: Parsed JSON document

    Returns:
        RunConfig

    Raises:
        ConfigInvalidError: If validation fails
    """
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        logger.error(f"Invalid run configuration: {e}")
        raise ConfigInvalidError(f"Invalid run configuration: {e}")


def load_run_config(path: str) -> RunConfig:
    """
    Read and validate a JSON run configuration.

    Args:
        path: Path to the configuration file

    Returns:
        RunConfig

    Raises:
        ConfigInvalidError: If the file is missing, malformed or invalid
    """
    if not validate_file_type(path, CONFIG_EXTENSIONS):
        raise ConfigInvalidError(f"Configuration file must be JSON, got '{path}'")
    try:
        data = read_json_file(path)
    except FileUtilsError as e:
        raise ConfigInvalidError(str(e))
    if not isinstance(data, dict):
        raise ConfigInvalidError(f"Configuration root in {path} must be an object")
    return parse_run_config(data)
