"""
Services package for the relaxation lab.

This package provides run configuration, seeded initial data, the
relaxation-rate study and the experiment service behind the CLI and API.
"""

from services.run_config import (
    RunConfig,
    InitialDataConfig,
    RateStudyConfig,
    EnergyConfig,
    ReformCheckConfig,
    LpAnalyzeConfig,
    ConfigInvalidError,
    parse_run_config,
    load_run_config
)

from services.initial_data import (
    band_limited_field,
    make_initial_data,
    relaxed_initial_data,
    initial_state_for
)

from services.rate_study import (
    RateStudyResult,
    FitIllConditionedError,
    fit_loglog,
    check_monotone,
    run_rate_study
)

from services.experiment_service import (
    ExperimentService,
    ExperimentServiceError,
    SUBCOMMANDS
)

__all__ = [
    'RunConfig',
    'InitialDataConfig',
    'RateStudyConfig',
    'EnergyConfig',
    'ReformCheckConfig',
    'LpAnalyzeConfig',
    'ConfigInvalidError',
    'parse_run_config',
    'load_run_config',
    'band_limited_field',
    'make_initial_data',
    'relaxed_initial_data',
    'initial_state_for',
    'RateStudyResult',
    'FitIllConditionedError',
    'fit_loglog',
    'check_monotone',
    'run_rate_study',
    'ExperimentService',
    'ExperimentServiceError',
    'SUBCOMMANDS'
]
