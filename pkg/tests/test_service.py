"""HTTP API: endpoint contracts, error envelopes and what-if lineage."""

import pytest
from fastapi.testclient import TestClient

from test_pipeline import small_model
from themis.service import SAMPLE_CAP, create_app
from themis.model import model_to_json


@pytest.fixture
def client():
    return TestClient(create_app())


@pytest.fixture
def loaded(client):
    resp = client.post("/api/models", json=model_to_json(small_model()))
    assert resp.status_code == 201
    return client, resp.json()["model_id"]


def _run(client, model_id, seed=4, samples=120):
    resp = client.post("/api/runs", json={
        "model_id": model_id, "config": {"seed": seed, "samples": samples}})
    assert resp.status_code == 200
    return resp.json()


def test_health(client):
    doc = client.get("/api/health").json()
    assert doc["status"] == "ok"
    assert "version" in doc


def test_model_upload_and_listing(loaded):
    client, model_id = loaded
    models = client.get("/api/models").json()["models"]
    assert [m["model_id"] for m in models] == [model_id]
    doc = client.get(f"/api/models/{model_id}").json()
    assert doc["model"]["region_name"] == "Smallland"


def test_model_upload_rejects_invalid(client):
    doc = model_to_json(small_model())
    doc["scenario_template"]["intervention_node"] = "missing"
    resp = client.post("/api/models", json=doc)
    assert resp.status_code == 422
    body = resp.json()
    assert body["code"] == "model_invalid"
    assert body["path"] == "/api/models"


def test_run_and_fetch(loaded):
    client, model_id = loaded
    run = _run(client, model_id)
    assert len(run["per_year"]) == 3
    assert run["started"] and run["finished"]
    fetched = client.get(f"/api/runs/{run['run_id']}").json()
    assert fetched["per_year"] == run["per_year"]
    listing = client.get("/api/runs").json()["runs"]
    assert listing[0]["run_id"] == run["run_id"]


def test_run_unknown_model_404(client):
    resp = client.post("/api/runs", json={"model_id": "nope"})
    assert resp.status_code == 404
    assert resp.json()["code"] == "not_found"


def test_run_sample_cap(loaded):
    client, model_id = loaded
    resp = client.post("/api/runs", json={
        "model_id": model_id, "config": {"samples": SAMPLE_CAP + 1}})
    assert resp.status_code == 422
    assert resp.json()["code"] == "config_error"


def test_whatif_empty_edits_reproduces_parent(loaded):
    client, model_id = loaded
    parent = _run(client, model_id)
    resp = client.post(f"/api/runs/{parent['run_id']}/whatif",
                       json={"edits": []})
    assert resp.status_code == 200
    child = resp.json()
    assert child["parent_run_id"] == parent["run_id"]
    assert child["run_id"] != parent["run_id"]
    assert child["per_year"] == parent["per_year"]


def test_whatif_trend_override_changes_result(loaded):
    client, model_id = loaded
    parent = _run(client, model_id)
    resp = client.post(f"/api/runs/{parent['run_id']}/whatif", json={
        "edits": [{"kind": "override_trend", "parameter_id": "x",
                   "slope": 0.0, "intercept": 60.0}]})
    assert resp.status_code == 200
    child = resp.json()
    assert child["per_year"][-1]["p_intervention_mean"] > \
        parent["per_year"][-1]["p_intervention_mean"]


def test_whatif_requires_edits_list(loaded):
    client, model_id = loaded
    parent = _run(client, model_id)
    resp = client.post(f"/api/runs/{parent['run_id']}/whatif", json={})
    assert resp.status_code == 422
    assert resp.json()["code"] == "bad_edit"


def test_whatif_bad_kind_maps_to_pipeline_error(loaded):
    client, model_id = loaded
    parent = _run(client, model_id)
    resp = client.post(f"/api/runs/{parent['run_id']}/whatif",
                       json={"edits": [{"kind": "no_such_edit"}]})
    assert resp.status_code == 422
    assert resp.json()["code"] == "pipeline_error"


def test_report_endpoint(loaded):
    client, model_id = loaded
    run = _run(client, model_id)
    doc = client.get(f"/api/runs/{run['run_id']}/report").json()
    assert doc["tripwire_threshold"] == 0.5
    assert len(doc["index_series"]) == 3
    low = client.get(f"/api/runs/{run['run_id']}/report",
                     params={"tripwire": 0.0}).json()
    assert low["tripwire_years"] == low["years"]
    bad = client.get(f"/api/runs/{run['run_id']}/report",
                     params={"tripwire": 2.0})
    assert bad.status_code == 422


def test_sensitivity_endpoint(loaded):
    client, model_id = loaded
    run = _run(client, model_id)
    doc = client.get(f"/api/runs/{run['run_id']}/sensitivity/x_high").json()
    assert doc["root"] == "x_high"
    assert len(doc["sweep"]) == 5
    ps = [p for _, p in doc["sweep"]]
    assert ps == sorted(ps)  # higher prior, higher intervention probability
    missing = client.get(f"/api/runs/{run['run_id']}/sensitivity/nope")
    assert missing.status_code == 404


def test_network_endpoint(loaded):
    client, model_id = loaded
    run = _run(client, model_id)
    doc = client.get(f"/api/runs/{run['run_id']}/network").json()
    node_ids = {n["id"] for n in doc["network"]["nodes"]}
    assert node_ids == {"x_high", "builder_ok", "intervention"}
    assert set(doc["marginals"]) == node_ids
    for p in doc["marginals"].values():
        assert 0.0 <= p <= 1.0


def test_unknown_run_404s(client):
    for path in ("/api/runs/x", "/api/runs/x/report",
                 "/api/runs/x/sensitivity/y", "/api/runs/x/network"):
        assert client.get(path).status_code == 404
    assert client.post("/api/runs/x/whatif", json={"edits": []}).status_code == 404
