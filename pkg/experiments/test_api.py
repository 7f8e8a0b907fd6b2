# python -m pytest experiments/test_api.py
import pytest
from fastapi.testclient import TestClient

from main import app


@pytest.fixture(scope="module")
def client():
    # with 블록 안에서 lifespan(설정 로드)이 실행됩니다.
    with TestClient(app) as c:
        yield c


class TestService:
    def test_health(self, client):
        res = client.get("/health")
        assert res.status_code == 200
        assert len(res.json()["config_hash"]) == 64

    def test_gw_bound(self, client):
        res = client.get("/bound/gw", params={"population": 6.7e-5})
        assert res.status_code == 200
        assert res.json()["result"]["h0"] == pytest.approx(5.5e-18, rel=0.02)

    def test_dp_bound_with_e33(self, client):
        res = client.get("/bound/dp", params={"population": 6.7e-5, "e33": 2.0})
        assert res.json()["result"]["kappa"] == pytest.approx(8.8e-10, rel=0.03)

    def test_unknown_channel(self, client):
        assert client.get("/bound/axion", params={"population": 1e-5}).status_code == 422

    def test_population_validated(self, client):
        assert client.get("/bound/csl", params={"population": 0.0}).status_code == 422

    def test_simulate(self, client):
        res = client.post("/simulate", json={"population": 1.9e-5})
        assert res.status_code == 200
        assert 3.35e-5 <= res.json()["result"]["population"] <= 1.34e-4

    def test_simulate_bad_override(self, client):
        res = client.post("/simulate", json={"population": 1e-5, "device_overrides": {"T1_ge": -1.0}})
        assert res.status_code == 400

    def test_project(self, client):
        res = client.get("/project/next_generation")
        assert res.status_code == 200
        assert res.json()["device"]["mode_number"] == 240

    def test_unknown_project(self, client):
        assert client.get("/project/lunar").status_code == 404
