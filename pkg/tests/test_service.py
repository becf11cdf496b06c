import math

import pytest
from fastapi.testclient import TestClient

from twedge.service import create_app

TOEPLITZ_50 = {"kind": "toeplitz", "coefficients": [1.0, 0.2, 0.3], "p": 50}
ATOMS_100 = {"kind": "atoms", "values": [10.0, 1.0], "masses": [0.3, 0.7], "p": 100}
ID_50 = {"kind": "atoms", "values": [1.0], "masses": [1.0], "p": 50}


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


class TestHealth:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert body["version"]


class TestSolve:
    def test_toeplitz_reference_values(self, client):
        resp = client.post("/solve", json={"model": TOEPLITZ_50, "n": 100})
        assert resp.status_code == 200
        body = resp.json()
        assert body["mu"] == pytest.approx(3.7297, abs=1e-4)
        assert body["sigma"] == pytest.approx(3.9271, abs=1e-4)
        assert body["p"] == 50
        assert max(body["residuals"].values()) <= 1e-9
        assert body["margin"] == pytest.approx(1.0 - body["alpha1"])

    def test_atoms_reference_values(self, client):
        body = client.post("/solve", json={"model": ATOMS_100, "n": 400}).json()
        assert body["mu"] == pytest.approx(16.417, abs=1e-3)
        assert body["sigma"] == pytest.approx(21.257, abs=1e-3)

    def test_validation_error_is_422(self, client):
        resp = client.post("/solve", json={"model": TOEPLITZ_50})
        assert resp.status_code == 422

    def test_unknown_kind_is_422(self, client):
        resp = client.post("/solve", json={"model": {"kind": "wigner"}, "n": 10})
        assert resp.status_code == 422

    def test_domain_error_is_400(self, client):
        bad = {"kind": "eigenvalues", "values": [1.0, -2.0]}
        resp = client.post("/solve", json={"model": bad, "n": 10})
        assert resp.status_code == 400
        assert "index" in resp.json()["detail"]


class TestTw:
    def test_cdf_scalar_and_vector(self, client):
        body = client.post("/tw/cdf", json={"s": -1.81}).json()
        assert body["values"][0] == pytest.approx(0.50, abs=0.02)
        body = client.post("/tw/cdf", json={"s": [-3.73, 0.48]}).json()
        assert body["values"][0] == pytest.approx(0.01, abs=0.02)
        assert body["values"][1] == pytest.approx(0.99, abs=0.02)

    def test_quantile(self, client):
        body = client.post("/tw/quantile", json={"prob": 0.5}).json()
        assert -1.83 <= body["values"][0] <= -1.75

    def test_quantile_domain_error(self, client):
        resp = client.post("/tw/quantile", json={"prob": 1e-9})
        assert resp.status_code == 400

    def test_reference_table(self, client):
        body = client.get("/tw/table").json()
        assert len(body["rows"]) == 9
        assert body["rows"][0]["s"] == -3.73
        for row in body["rows"]:
            assert row["F0"] == pytest.approx(row["target"], abs=0.02)

    def test_grid_export(self, client):
        body = client.get("/tw/grid", params={"step": 100}).json()
        assert body["rows"][0]["x"] == -12.0
        assert len(body["rows"]) == 21


class TestSpike:
    def test_identity_base_classification(self, client):
        threshold = 1.0 + 1.0 / math.sqrt(2.0)
        resp = client.post(
            "/spike",
            json={"model": ID_50, "n": 100, "spikes": [1.2, threshold, 3.0]},
        )
        body = resp.json()
        assert [s["regime"] for s in body["spikes"]] == [
            "subcritical",
            "critical",
            "supercritical",
        ]
        assert body["threshold"] == pytest.approx(threshold, rel=1e-12)
        assert body["c_tilde"] < body["c_base"]
        assert "supercritical" in body["warning"]

    def test_low_spike_domain_error(self, client):
        resp = client.post("/spike", json={"model": ID_50, "n": 100, "spikes": [0.5]})
        assert resp.status_code == 400


class TestDiagnose:
    def test_atom_bound_reported(self, client):
        body = client.post("/diagnose", json={"model": ATOMS_100, "n": 100}).json()
        assert body["atom_bound"] == pytest.approx(1.0 / (1.0 + math.sqrt(0.3)), rel=1e-12)
        assert body["passed"]

    def test_aspect_ratio_failure_reported(self, client):
        body = client.post(
            "/diagnose", json={"model": {"kind": "atoms", "values": [1.0], "masses": [1.0], "p": 10}, "n": 5}
        ).json()
        assert not body["passed"]
        failed = {c["name"] for c in body["checks"] if not c["passed"]}
        assert "aspect_ratio" in failed

    def test_toeplitz_gets_flat_spot_diagnostic(self, client):
        body = client.post("/diagnose", json={"model": TOEPLITZ_50, "n": 100}).json()
        assert body["symbol_flat_spots"] == []
        body = client.post("/diagnose", json={"model": ATOMS_100, "n": 100}).json()
        assert body["symbol_flat_spots"] is None


class TestSimulate:
    def test_small_run_deterministic(self, client):
        request = {"model": ID_50, "n": 100, "replications": 25, "master_seed": 11}
        first = client.post("/simulate", json=request).json()
        second = client.post("/simulate", json=request).json()
        assert first["rows"] == second["rows"]
        assert first["mean"] == second["mean"]
        assert first["edge"]["mu"] == pytest.approx((1.0 + 1.0 / math.sqrt(2.0)) ** 2, rel=1e-10)
        assert len(first["rows"]) == 9

    def test_keep_samples(self, client):
        request = {
            "model": ID_50,
            "n": 100,
            "replications": 3,
            "master_seed": 11,
            "top_k": 2,
            "keep_samples": True,
        }
        body = client.post("/simulate", json=request).json()
        assert len(body["samples"]) == 3
        assert len(body["samples"][0]) == 2
        assert body["samples"][0][0] >= body["samples"][0][1]

    def test_custom_grid(self, client):
        request = {
            "model": ID_50,
            "n": 100,
            "replications": 10,
            "master_seed": 2,
            "quantile_grid": [[-2.0, 0.25], [8.0, 1.0]],
        }
        body = client.post("/simulate", json=request).json()
        assert len(body["rows"]) == 2
        assert body["rows"][1]["f_hat"] == 1.0


class TestExperiments:
    def test_universality_endpoint(self, client):
        request = {
            "values": [1.0],
            "masses": [1.0],
            "p_ladder": [8, 16],
            "ratio": 2.0,
            "replications": 200,
            "master_seed": 5,
        }
        body = client.post("/universality", json=request).json()
        assert len(body["rungs"]) == 2
        assert body["rungs"][0]["p"] == 8

    def test_concentration_endpoint(self, client):
        request = {
            "model": {"kind": "atoms", "values": [1.0], "masses": [1.0], "p": 20},
            "n": 20,
            "radii": [0.0, 0.6],
            "replications": 1000,
            "master_seed": 5,
        }
        body = client.post("/concentration", json=request).json()
        assert body["rows"][0]["bound"] == 2.0
        assert body["passed"]

    def test_concentration_replication_floor_is_422(self, client):
        request = {
            "model": ID_50,
            "n": 20,
            "radii": [0.1],
            "replications": 10,
            "master_seed": 5,
        }
        resp = client.post("/concentration", json=request)
        assert resp.status_code == 422
