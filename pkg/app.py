"""
Relaxation Lab - HTTP Entry Point (FastAPI)

Initializes the FastAPI application and registers the experiment routes.
"""

from typing import Optional

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from config import FASTAPI_CONFIG, LOGGING_CONFIG
from utils.logging_utils import setup_logging
from api.routes import register_routes
from services.experiment_service import ExperimentService


def create_app(output_dir: Optional[str] = None) -> FastAPI:
    """
    Create and configure the FastAPI application.
    
    Args:
        output_dir: Overrides the output directory of every request
    
    Returns:
        Configured FastAPI application instance
    """
    setup_logging(log_level=LOGGING_CONFIG["level"], log_file=LOGGING_CONFIG["log_file"])
    
    app = FastAPI(
        title="Relaxation Lab API",
        description="Pseudo-spectral experiments on damped two-phase flow and its pressure-relaxation limit",
        version="1.0.0"
    )
    
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    
    register_routes(app, ExperimentService(output_dir=output_dir))
    
    return app


app = create_app()


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "app:app",
        host=FASTAPI_CONFIG["host"],
        port=FASTAPI_CONFIG["port"],
        reload=FASTAPI_CONFIG["reload"]
    )
