"""HTTP API tests: happy path, error statuses, body cap, timeout clamp."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from conftest import latest_price_problem
from sqlsynth.problemio import problem_to_json
from sqlsynth.service import MAX_BODY_BYTES, create_app

SORT_DOC = {
    "inputs": {
        "t": {
            "columns": [{"name": "a", "type": "Int"},
                        {"name": "b", "type": "Str"}],
            "rows": [[2, "y"], [1, "x"], [3, "z"]],
        }
    },
    "output": {
        "columns": [{"name": "a", "type": "Int"},
                    {"name": "b", "type": "Str"}],
        "rows": [[1, "x"], [2, "y"], [3, "z"]],
    },
}


@pytest.fixture(scope="module")
def client() -> TestClient:
    return TestClient(create_app())


def test_health(client):
    resp = client.get("/api/health")
    assert resp.status_code == 200
    assert resp.json() == {"ok": True}


def test_synthesize_solves_a_problem(client):
    resp = client.post("/api/synthesize", json=SORT_DOC)
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "solved"
    assert "ORDER BY" in body["sql"]
    assert body["dsl"].startswith("Order(")
    assert isinstance(body["elapsed_ms"], (int, float))
    assert body["stats"]["sketches_tried"] >= 1
    assert body["stats"]["candidates_checked"] >= 1


def test_synthesize_reports_exhausted_without_sql(client):
    doc = {
        "inputs": {"t": {"columns": [{"name": "a", "type": "Int"}],
                         "rows": [[1], [2]]}},
        "output": {"columns": [{"name": "a", "type": "Int"}], "rows": [[5]]},
        "config": {"max_sketch_size": 0},
    }
    body = client.post("/api/synthesize", json=doc).json()
    assert body["status"] == "exhausted"
    assert "sql" not in body and "dsl" not in body
    assert body["stats"]["sketches_tried"] >= 1


def test_malformed_json_is_a_400(client):
    resp = client.post("/api/synthesize", content=b"{not json",
                       headers={"content-type": "application/json"})
    assert resp.status_code == 400
    body = resp.json()
    assert body["status"] == "invalid"
    assert "JSON" in body["error"]


def test_invalid_problem_is_a_400_with_json_path(client):
    doc = {"inputs": SORT_DOC["inputs"]}  # no output table
    resp = client.post("/api/synthesize", json=doc)
    assert resp.status_code == 400
    body = resp.json()
    assert body["status"] == "invalid"
    assert "output" in body["error"]


def test_unknown_config_key_is_a_400(client):
    doc = dict(SORT_DOC, config={"warp_speed": True})
    resp = client.post("/api/synthesize", json=doc)
    assert resp.status_code == 400
    assert "warp_speed" in resp.json()["error"]


def test_oversize_body_is_a_413_before_parsing(client):
    resp = client.post("/api/synthesize", content=b"x" * (MAX_BODY_BYTES + 1),
                       headers={"content-type": "application/json"})
    assert resp.status_code == 413
    assert "megabyte" in resp.json()["error"]


def test_body_at_the_cap_is_parsed_not_rejected(client):
    payload = json.dumps(SORT_DOC).encode()
    padded = payload + b" " * (MAX_BODY_BYTES - len(payload))
    assert len(padded) == MAX_BODY_BYTES
    resp = client.post("/api/synthesize", content=padded,
                       headers={"content-type": "application/json"})
    assert resp.status_code == 200
    assert resp.json()["status"] == "solved"


def test_requested_timeout_is_clamped_to_server_cap():
    capped = TestClient(create_app(timeout_cap_ms=50))
    doc = problem_to_json(latest_price_problem())
    doc["config"] = {"timeout_ms": 60_000}
    body = capped.post("/api/synthesize", json=doc).json()
    assert body["status"] == "timeout"
    assert body["elapsed_ms"] < 2_000
    assert "sql" not in body


def test_cors_allows_any_origin(client):
    resp = client.get("/api/health", headers={"Origin": "http://localhost:3000"})
    assert resp.headers.get("access-control-allow-origin") == "*"


def test_cors_preflight_for_post(client):
    resp = client.options(
        "/api/synthesize",
        headers={"Origin": "http://localhost:3000",
                 "Access-Control-Request-Method": "POST",
                 "Access-Control-Request-Headers": "content-type"})
    assert resp.status_code == 200
    assert resp.headers.get("access-control-allow-origin") == "*"
