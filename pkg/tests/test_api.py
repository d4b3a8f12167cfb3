"""Tests for the HTTP surface."""

import pytest
from fastapi import FastAPI
from fastapi.testclient import TestClient

from api.routes import register_routes
from services.experiment_service import ExperimentService


@pytest.fixture
def client(tmp_path):
    app = FastAPI()
    register_routes(app, ExperimentService(output_dir=str(tmp_path / "api")))
    return TestClient(app, raise_server_exceptions=False)


class TestRoutes:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"success": True, "data": {"status": "ok"}}

    def test_simulate(self, client, run_config_data, tmp_path):
        response = client.post("/simulate", json=run_config_data)
        assert response.status_code == 200
        body = response.json()
        assert body["success"] is True
        assert body["data"]["steps"] == 10
        assert body["data"]["output_dir"] == str(tmp_path / "api")

    def test_lp_analyze(self, client, run_config_data):
        response = client.post("/lp-analyze", json=run_config_data)
        assert response.status_code == 200
        assert response.json()["data"]["partition_residual"] < 1e-10

    def test_invalid_config_envelope(self, client, run_config_data):
        response = client.post("/simulate", json={**run_config_data, "unknown_key": 1})
        assert response.status_code == 422
        body = response.json()
        assert body["success"] is False
        assert body["error"]["code"] == "CONFIG_INVALID"

    def test_numerical_failure_envelope(self, client, run_config_data):
        response = client.post("/simulate", json={**run_config_data, "step": {"dt": 1.0, "t_end": 2.0}})
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "CFL_VIOLATION"

    def test_configuration_error_envelope(self, client, run_config_data):
        body = {**run_config_data, "system": "reform", "observers": ["conservation"]}
        response = client.post("/simulate", json=body)
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "CONFIG_INVALID"
