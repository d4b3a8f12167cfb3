"""
API response formatters for the relaxation lab.

This module provides the success/error envelopes shared by the HTTP API and
the command-line interface.
"""

from typing import Any, Dict, Optional

from fastapi.responses import JSONResponse

from utils.errors import ConfigError, LabError


def success_payload(data: Any = None, message: Optional[str] = None) -> Dict[str, Any]:
    """
    Build a success envelope.
    
    Args:
        data: Response data
        message: Optional success message
        
    Returns:
        Dict with data and success status
    """
    response = {
        "success": True,
        "data": data
    }
    
    if message:
        response["message"] = message
        
    return response


def error_payload(message: str, error_code: Optional[str] = None) -> Dict[str, Any]:
    """
    Build an error envelope.
    
    Args:
        message: Error message
        error_code: Machine-readable error code
        
    Returns:
        Dict with error details
    """
    response = {
        "success": False,
        "error": {
            "message": message
        }
    }
    
    if error_code:
        response["error"]["code"] = error_code
        
    return response


def error_response(message: str, status_code: int = 400, error_code: Optional[str] = None) -> JSONResponse:
    """Error envelope as a FastAPI response."""
    return JSONResponse(status_code=status_code, content=error_payload(message, error_code))


def lab_error_payload(error: LabError) -> Dict[str, Any]:
    return error_payload(str(error), getattr(error, "code", "LAB_ERROR"))


def lab_error_response(error: LabError) -> JSONResponse:
    """400 for configuration errors, 422 for numerical failures."""
    status_code = 400 if isinstance(error, ConfigError) else 422
    return JSONResponse(status_code=status_code, content=lab_error_payload(error))


def server_error_response(message: str = "Internal server error") -> JSONResponse:
    return error_response(message, status_code=500, error_code="SERVER_ERROR")
