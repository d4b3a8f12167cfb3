"""
Configuration module for the two-phase relaxation laboratory.

This module loads environment variables and provides the default settings
used by the CLI, the HTTP surface and the experiment services.
"""

import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Laboratory defaults
LAB_CONFIG = {
    "output_dir": os.getenv("LAB_OUTPUT_DIR", "runs"),
    "inversion_radius": float(os.getenv("LAB_INVERSION_RADIUS", 0.1)),
    "newton_max_iter": int(os.getenv("LAB_NEWTON_MAX_ITER", 50)),
    "workers": int(os.getenv("LAB_WORKERS", 1)),
}

# Logging configuration
LOGGING_CONFIG = {
    "level": os.getenv("LAB_LOG_LEVEL", "INFO"),
    "log_file": os.getenv("LAB_LOG_FILE") or None,
}

# FastAPI configuration
FASTAPI_CONFIG = {
    "host": os.getenv("LAB_HOST", "127.0.0.1"),
    "port": int(os.getenv("PORT", 5000)),
    "reload": os.getenv("ENVIRONMENT", "production") == "development"
}
