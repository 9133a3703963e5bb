"""HTTP endpoint contract tests (in-process, no network)."""

import pytest
from fastapi.testclient import TestClient

from coopsense.service.app import create_app

INSTANCE = {
    "gamma": [9e3, 1.2e4, 1.5e4],
    "C_bits": 20e6,
    "beta_s_sec": 2.0,
    "bandwidth_hz": 1e5,
    "p_max_w": 0.01,
    "energy_budget_j": 1.0,
}


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


class TestHealthAndPresets:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}

    def test_presets(self, client):
        resp = client.get("/presets")
        assert resp.status_code == 200
        body = resp.json()["presets"]
        assert body["paper-default"]["gamma"] == [9e3, 1.2e4, 1.5e4]


class TestSolve:
    def test_solve_preset_baseline(self, client):
        resp = client.post(
            "/solve", json={"preset": "paper-default", "scheme": "full_c"}
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["report"]["total_T"] == pytest.approx(25.540891336663822)
        assert body["report"]["omega"] == [1.0, 0.0, 0.0, 0.0]
        assert body["necessity"]["overlap_possible"] is True

    def test_solve_inline_instance(self, client):
        resp = client.post(
            "/solve",
            json={"instance": INSTANCE, "scheme": "proposed", "epsilon": 0.03},
        )
        assert resp.status_code == 200
        body = resp.json()["report"]
        assert body["scheme"] == "proposed"
        assert body["total_T"] == pytest.approx(25.540891336663822, rel=1e-3)
        assert len(body["energies"]) == 3

    def test_unknown_preset_404(self, client):
        resp = client.post("/solve", json={"preset": "nope"})
        assert resp.status_code == 404

    def test_infeasible_maps_to_422(self, client):
        starved = dict(INSTANCE, energy_budget_j=3e-3)
        resp = client.post(
            "/solve", json={"instance": starved, "scheme": "full_c"}
        )
        assert resp.status_code == 422
        assert resp.json()["detail"]["code"] == "infeasible"

    def test_bad_payload_422(self, client):
        bad = dict(INSTANCE, bandwidth_hz=-1.0)
        resp = client.post("/solve", json={"instance": bad})
        assert resp.status_code == 422


class TestSweepAndCheck:
    def test_sweep_then_check_round_trip(self, client):
        sweep_req = {
            "preset": "paper-default",
            "epsilon": 0.03,
            "sweep": {
                "param": "beta_s",
                "values": [2.0, 6.0],
                "schemes": ["proposed", "uta_wc"],
            },
        }
        resp = client.post("/sweep", json=sweep_req)
        assert resp.status_code == 200
        body = resp.json()
        assert len(body["rows"]) == 4
        assert body["mean_gaps_percent"]["uta_wc"] > 0.0

        check_req = {"preset": "paper-default", "rows": body["rows"]}
        resp = client.post("/check", json=check_req)
        assert resp.status_code == 200
        assert resp.json()["all_passed"] is True

    def test_check_flags_tampered_row(self, client):
        resp = client.post(
            "/sweep",
            json={
                "preset": "paper-default",
                "sweep": {"param": "beta_s", "values": [2.0], "schemes": ["uta_wc"]},
            },
        )
        row = resp.json()["rows"][0]
        row["t_n"] = [t * 0.2 for t in row["t_n"]]
        resp = client.post(
            "/check", json={"preset": "paper-default", "rows": [row]}
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["all_passed"] is False
        assert body["rows"][0]["violations"]


class TestOracleAndTrace:
    def test_oracle(self, client):
        resp = client.post(
            "/oracle", json={"preset": "paper-default", "grid_step": 0.25}
        )
        assert resp.status_code == 200
        body = resp.json()
        assert sum(body["omega"]) == pytest.approx(1.0)
        assert body["total_T"] <= 25.540891336663822 * (1.0 + 1e-9)

    def test_oracle_bad_grid_step(self, client):
        resp = client.post(
            "/oracle", json={"preset": "paper-default", "grid_step": 0.3}
        )
        assert resp.status_code == 422
        assert resp.json()["detail"]["code"] == "bad_request"

    def test_trace(self, client):
        resp = client.post(
            "/trace", json={"preset": "paper-default", "epsilon": 0.03}
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["report"]["total_T"] == pytest.approx(
            25.540891336663822, rel=1e-3
        )
        rows = body["rows"]
        cbvs = [r["cbv"] for r in rows]
        assert cbvs == sorted(cbvs, reverse=True)
