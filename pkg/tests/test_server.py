import random
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from cpptopics import TOPIC_NAMES, Topic
from cpptopics.bundle import ModelBundle
from cpptopics.config import ServiceConfig
from cpptopics.server import create_app
from cpptopics import synthetic


@pytest.fixture(scope="module")
def client(trained_model):
    app = create_app(ModelBundle(trained_model), ServiceConfig(max_code_chars=50_000))
    with TestClient(app) as c:
        yield c


@pytest.fixture(scope="module")
def operator_doc():
    doc, gold = synthetic.make_document(
        Topic.OPERATOR_OVERLOAD, "req.cpp", random.Random(8)
    )
    return doc, gold[0].span


def test_topics_endpoint_stable_order(client):
    first = client.get("/api/topics")
    second = client.get("/api/topics")
    assert first.status_code == 200
    assert first.json() == {"topics": list(TOPIC_NAMES)}
    assert first.json() == second.json()


def test_highlight_endpoint_finds_operator(client, operator_doc):
    doc, gold_span = operator_doc
    response = client.post(
        "/api/highlight", json={"code": doc.content, "topics": ["OperatorOverload"]}
    )
    assert response.status_code == 200
    payload = response.json()
    assert payload["elapsed_ms"] >= 0
    spans = payload["spans"]
    assert len(spans) == 1
    span = spans[0]
    assert span["topic"] == "OperatorOverload"
    assert span["confidence"] >= 0.8
    overlap = max(0, min(span["end"], gold_span.end) - max(span["start"], gold_span.start))
    assert overlap / len(gold_span) > 0.9


def test_unknown_topic_is_400_with_valid_names(client):
    response = client.post("/api/highlight", json={"code": "int x;", "topics": ["Bogus"]})
    assert response.status_code == 400
    message = response.json()["error"]
    for name in TOPIC_NAMES:
        assert name in message


def test_empty_matches_are_200(client):
    response = client.post(
        "/api/highlight", json={"code": "int main() { return 0; }", "topics": ["Friend"]}
    )
    assert response.status_code == 200
    assert response.json()["spans"] == []


def test_malformed_body_is_400(client):
    response = client.post(
        "/api/highlight", content=b"{", headers={"content-type": "application/json"}
    )
    assert response.status_code == 400
    assert "error" in response.json()


def test_missing_code_field_is_400(client):
    response = client.post("/api/highlight", json={"topics": ["Friend"]})
    assert response.status_code == 400


def test_oversized_code_is_400(client):
    response = client.post("/api/highlight", json={"code": "x" * 50_001})
    assert response.status_code == 400
    assert "size limit" in response.json()["error"]


def test_unknown_body_field_is_400(client):
    response = client.post("/api/highlight", json={"code": "int x;", "extra": 1})
    assert response.status_code == 400
    assert "extra" in response.json()["error"]


def test_config_overrides_round_trip(client, operator_doc):
    doc, _ = operator_doc
    base = client.post(
        "/api/highlight", json={"code": doc.content, "topics": ["OperatorOverload"]}
    ).json()["spans"]
    loose = client.post(
        "/api/highlight",
        json={
            "code": doc.content,
            "topics": ["OperatorOverload"],
            "config_overrides": {"threshold": 0.99, "expand_boundaries": False},
        },
    ).json()["spans"]
    base_chars = sum(s["end"] - s["start"] for s in base)
    loose_chars = sum(s["end"] - s["start"] for s in loose)
    assert loose_chars <= base_chars


def test_bad_override_key_is_400(client):
    response = client.post(
        "/api/highlight",
        json={"code": "int x;", "config_overrides": {"window": 3}},
    )
    assert response.status_code == 400


def test_concurrent_requests_match_serial_results(client, operator_doc):
    doc, _ = operator_doc
    body = {"code": doc.content, "topics": ["OperatorOverload", "TryCatch"]}
    serial = client.post("/api/highlight", json=body).json()["spans"]

    def call(_):
        return client.post("/api/highlight", json=body).json()["spans"]

    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(call, range(16)))
    assert all(spans == serial for spans in results)


def test_fallback_index_page(client):
    response = client.get("/")
    assert response.status_code == 200
    assert "cpptopics" in response.text
