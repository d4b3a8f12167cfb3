"""
API routes for the relaxation lab (FastAPI).

Each experiment route takes a RunConfig body, runs synchronously and returns
the same payload as the corresponding CLI subcommand.
"""

import logging
from typing import Any, Dict, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError

from api.responses import error_response, lab_error_response, server_error_response, success_payload
from services.experiment_service import ExperimentService
from services.run_config import RunConfig
from utils.errors import LabError

logger = logging.getLogger(__name__)


def register_routes(app: FastAPI, service: Optional[ExperimentService] = None) -> None:
    """
    Register API routes and error handlers with the FastAPI application.
    
    Args:
        app: FastAPI application instance
        service: Experiment service (a default one is created if omitted)
    """
    service = service or ExperimentService()

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        logger.error(f"Invalid request to {request.url.path}: {exc.errors()}")
        return error_response(f"Invalid run configuration: {exc.errors()}", status_code=422,
                              error_code="CONFIG_INVALID")

    @app.exception_handler(LabError)
    async def handle_lab_error(request: Request, exc: LabError):
        logger.error(f"Error in {request.url.path}: {exc}")
        return lab_error_response(exc)

    @app.exception_handler(Exception)
    async def handle_unexpected(request: Request, exc: Exception):
        logger.error(f"Unexpected error in {request.url.path}: {exc}")
        return server_error_response(f"Unexpected error: {exc}")

    @app.get("/health")
    def health() -> Dict[str, Any]:
        return success_payload({"status": "ok"})

    @app.post("/simulate")
    def simulate(cfg: RunConfig) -> Dict[str, Any]:
        """Integrate the configured system."""
        return success_payload(service.run("simulate", cfg))

    @app.post("/reform-check")
    def reform_check(cfg: RunConfig) -> Dict[str, Any]:
        """Roundtrip and chain-rule checks of the change of unknowns."""
        return success_payload(service.run("reform-check", cfg))

    @app.post("/energy-monitor")
    def energy_monitor(cfg: RunConfig) -> Dict[str, Any]:
        """Block energy functionals along a run."""
        return success_payload(service.run("energy-monitor", cfg))

    @app.post("/rate-study")
    def rate_study(cfg: RunConfig) -> Dict[str, Any]:
        """nu sweep and fitted relaxation rate."""
        return success_payload(service.run("rate-study", cfg))

    @app.post("/lp-analyze")
    def lp_analyze(cfg: RunConfig) -> Dict[str, Any]:
        """Littlewood-Paley report of the initial fields."""
        return success_payload(service.run("lp-analyze", cfg))

    logger.info("Registered lab routes")
