"""
File utility functions for the two-phase relaxation laboratory.

This module provides helpers for output directories, config hashing and
file-name validation.
"""

import os
import json
import hashlib
import logging
from typing import Any, Dict, List

from utils.errors import ConfigError

logger = logging.getLogger(__name__)


class FileUtilsError(ConfigError):
    """Custom exception for file utility errors."""
    code = "FILE_ERROR"


def get_file_extension(filename: str) -> str:
    """
    Get the file extension from a filename.
    
    Args:
        filename: Name of the file
        
    Returns:
        File extension (lowercase) including the period
    """
    return os.path.splitext(filename)[1].lower()


def validate_file_type(filename: str, allowed_extensions: List[str]) -> bool:
    """
    Validate if a file has an allowed extension.
    
    Args:
        filename: Name of the file
        allowed_extensions: List of allowed extensions (with period)
        
    Returns:
        True if file extension is allowed, False otherwise
    """
    return get_file_extension(filename) in allowed_extensions


def ensure_directory(path: str) -> str:
    """
    Create a directory (and parents) if it does not exist yet.
    
    Args:
        path: Directory path
        
    Returns:
        The same path, for chaining
        
    Raises:
        FileUtilsError: If the directory cannot be created
    """
    try:
        os.makedirs(path, exist_ok=True)
        return path
    except OSError as e:
        logger.error(f"Error creating directory '{path}': {e}")
        raise FileUtilsError(f"Failed to create directory '{path}': {e}")


def read_json_file(path: str) -> Dict[str, Any]:
    """
    Read a JSON document from disk.
    
    Args:
        path: Path to the JSON file
        
    Returns:
        Parsed document
        
    Raises:
        FileUtilsError: If the file is missing or not valid JSON
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise FileUtilsError(f"Config file not found: {path}")
    except json.JSONDecodeError as e:
        raise FileUtilsError(f"Config file '{path}' is not valid JSON: {e}")


def canonical_hash(document: Dict[str, Any]) -> str:
    """
    Hash a JSON-serializable document independently of key order.
    
    Args:
        document: JSON-serializable mapping
        
    Returns:
        Hex sha256 digest of the canonical serialization
    """
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
