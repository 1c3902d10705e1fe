import numpy as np
import pytest
from fastapi.testclient import TestClient

import lvsim
from lvsim.observation import AttackerSpec, sample_legitimate, sample_malicious
from lvsim.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


FAST_SCENARIO = {"trials": 40, "seed": 11, "t_grid": [1.0, 2.0, 4.0, 8.0]}


class TestHealth:
    def test_health_reports_version(self, client):
        r = client.get("/health")
        assert r.status_code == 200
        body = r.json()
        assert body["status"] == "ok"
        assert body["version"] == lvsim.__version__


class TestVerify:
    def test_legitimate_snapshot_accepted(self, client):
        cfg = lvsim.default_config()
        snap = sample_legitimate(
            cfg.channel, cfg.deployment, cfg.claimed, 10, np.random.default_rng(1)
        )
        r = client.post(
            "/verify",
            json={
                "claimed": {"x": 0.0, "y": 40.0},
                "observations": snap.values.tolist(),
                "threshold": 4.75,
            },
        )
        assert r.status_code == 200
        body = r.json()
        assert body["verdict"] == "legitimate"
        assert body["mahalanobis_sq"] <= 4.75
        assert body["converged"] is True

    def test_distant_spoofer_flagged(self, client):
        cfg = lvsim.default_config()
        snap = sample_malicious(
            cfg.channel,
            cfg.deployment,
            AttackerSpec.at_position(lvsim.Position(0.0, 10040.0)),
            cfg.claimed,
            10,
            np.random.default_rng(2),
        )
        r = client.post(
            "/verify",
            json={
                "claimed": {"x": 0.0, "y": 40.0},
                "observations": snap.values.tolist(),
                "threshold": 4.75,
            },
        )
        assert r.status_code == 200
        body = r.json()
        assert body["verdict"] == "malicious"
        assert body["mahalanobis_sq"] > 4.75

    def test_row_count_mismatch_rejected(self, client):
        r = client.post(
            "/verify",
            json={
                "claimed": {"x": 0.0, "y": 40.0},
                "observations": [[-60.0] * 10] * 3,
                "threshold": 4.75,
            },
        )
        assert r.status_code == 422
        assert "stations" in r.json()["detail"]

    def test_single_station_geometry_rejected(self, client):
        r = client.post(
            "/verify",
            json={
                "deployment": {
                    "stations": [{"x": 0.0, "y": 0.0}],
                    "region": {"xmin": -50, "ymin": -50, "xmax": 50, "ymax": 50},
                },
                "claimed": {"x": 10.0, "y": 10.0},
                "observations": [[-60.0] * 10],
                "threshold": 4.75,
            },
        )
        assert r.status_code == 422

    def test_bad_threshold_rejected(self, client):
        r = client.post(
            "/verify",
            json={
                "claimed": {"x": 0.0, "y": 40.0},
                "observations": [[-60.0] * 10] * 4,
                "threshold": 0.0,
            },
        )
        assert r.status_code == 422


class TestTheoryEndpoints:
    def test_rates_at_requested_thresholds(self, client):
        r = client.post("/rates/theory", json={"thresholds": [1.0, 4.75]})
        assert r.status_code == 200
        points = r.json()["points"]
        assert [p["t"] for p in points] == [1.0, 4.75]
        assert points[0]["alpha"] > points[1]["alpha"]
        assert all(0 <= p["c_idc"] <= 1 for p in points)

    def test_optimize_returns_reference_threshold(self, client):
        r = client.post("/threshold/optimize", json={})
        assert r.status_code == 200
        body = r.json()
        assert abs(body["t0"] - 4.75) <= 0.75
        assert len(body["curve"]) == 400
        assert 0 <= body["alpha"] <= 1 and 0 <= body["beta"] <= 1

    def test_invalid_sigma_rejected(self, client):
        r = client.post(
            "/rates/theory", json={"scenario": {"channel": {"sigma_db": -1.0}}}
        )
        assert r.status_code == 422


class TestSimulationEndpoints:
    def test_threshold_sweep(self, client):
        r = client.post("/simulate/sweep", json={"scenario": FAST_SCENARIO})
        assert r.status_code == 200
        body = r.json()
        assert len(body["points"]) == 4
        assert body["n_legitimate"] + body["n_malicious"] + body["excluded"] == 40
        assert body["t0_theory"] in [1.0, 2.0, 4.0, 8.0]

    def test_sigma_sweep(self, client):
        r = client.post(
            "/simulate/sigma-sweep",
            json={
                "scenario": {"trials": 25, "seed": 3},
                "sigma_list": [5.0],
                "t_multipliers": [0.5, 1.0, 2.0],
            },
        )
        assert r.status_code == 200
        points = r.json()["points"]
        assert len(points) == 3
        t0 = points[1]["threshold"]
        assert points[0]["threshold"] == pytest.approx(0.5 * t0)
        assert points[2]["threshold"] == pytest.approx(2.0 * t0)

    def test_same_seed_same_results(self, client):
        a = client.post("/simulate/sweep", json={"scenario": FAST_SCENARIO}).json()
        b = client.post("/simulate/sweep", json={"scenario": FAST_SCENARIO}).json()
        assert a == b
