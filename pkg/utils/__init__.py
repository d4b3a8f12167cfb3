"""
Utilities package for the two-phase relaxation laboratory.

This package provides logging setup, file helpers and the base exceptions.
"""

from utils.file_utils import (
    get_file_extension,
    validate_file_type,
    ensure_directory,
    read_json_file,
    canonical_hash,
    FileUtilsError
)
from utils.logging_utils import setup_logging
from utils.errors import LabError, ConfigError, NumericalError

__all__ = [
    'get_file_extension',
    'validate_file_type',
    'ensure_directory',
    'read_json_file',
    'canonical_hash',
    'FileUtilsError',
    'setup_logging',
    'LabError',
    'ConfigError',
    'NumericalError'
]
