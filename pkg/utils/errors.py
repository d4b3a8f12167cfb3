"""
Base exceptions shared by every package of the laboratory.

Each package defines its own error classes on top of these; the CLI and
the HTTP layer only need the two families below to pick an exit code.
"""


class LabError(Exception):
    """Base exception for laboratory errors."""
    code = "LAB_ERROR"


class ConfigError(LabError):
    """Invalid or missing configuration (usage-level failure)."""
    code = "CONFIG_ERROR"


class NumericalError(LabError):
    """Failure raised while computing (inadmissible state, divergence, ...)."""
    code = "NUMERICAL_ERROR"
