"""
API package for the relaxation lab.

This package provides the HTTP routes and the response envelopes.
"""

from api.routes import register_routes
from api.responses import (
    success_payload,
    error_payload,
    error_response,
    lab_error_payload,
    lab_error_response,
    server_error_response
)

__all__ = [
    'register_routes',
    'success_payload',
    'error_payload',
    'error_response',
    'lab_error_payload',
    'lab_error_response',
    'server_error_response'
]
