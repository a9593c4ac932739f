import numpy as np
import pytest
from fastapi.testclient import TestClient

from keyscore_provider.app import create_app


@pytest.fixture
def client():
    with TestClient(create_app(max_batch=8)) as c:
        yield c


class TestHealth:
    def test_ready_reports_model_and_dimension(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ready"
        assert body["model_id"] == "hash-256"
        assert body["dimension"] == 256
        assert "hash-64" in body["models"]

    def test_503_while_not_loaded(self):
        app = create_app()
        # no lifespan: the TestClient call below never ran startup
        client = TestClient(app)
        assert client.get("/health").status_code == 503


class TestEmbed:
    def test_basic_response_shape(self, client):
        resp = client.post("/embed", json={
            "phrases": ["routing protocols"], "model_id": "hash-64"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["dimension"] == 64
        (res,) = body["results"]
        assert res["phrase"] == "routing protocols"
        assert res["tokens"] == ["routing", "protocols"]
        assert len(res["vectors"]) == 2

    def test_same_phrase_twice_identical(self, client):
        resp = client.post("/embed", json={
            "phrases": ["neural nets", "neural nets"], "model_id": "hash-64"})
        a, b = resp.json()["results"]
        assert a["vectors"] == b["vectors"]

    def test_unit_norms(self, client):
        resp = client.post("/embed", json={
            "phrases": ["alpha beta gamma"], "model_id": "hash-256"})
        vectors = np.asarray(resp.json()["results"][0]["vectors"])
        assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-6)

    def test_unknown_model_404(self, client):
        resp = client.post("/embed", json={
            "phrases": ["x"], "model_id": "nope"})
        assert resp.status_code == 404

    def test_oversize_batch_413(self, client):
        resp = client.post("/embed", json={
            "phrases": [f"p{i}" for i in range(9)], "model_id": "hash-64"})
        assert resp.status_code == 413

    def test_empty_phrase_400(self, client):
        resp = client.post("/embed", json={
            "phrases": ["  "], "model_id": "hash-64"})
        assert resp.status_code == 400

    def test_malformed_json_400(self, client):
        resp = client.post("/embed", content=b"{not json",
                           headers={"content-type": "application/json"})
        assert resp.status_code == 400

    def test_missing_field_400(self, client):
        resp = client.post("/embed", json={"model_id": "hash-64"})
        assert resp.status_code == 400

    def test_response_order_matches_request(self, client):
        phrases = ["one", "two", "three"]
        resp = client.post("/embed", json={
            "phrases": phrases, "model_id": "hash-64"})
        assert [r["phrase"] for r in resp.json()["results"]] == phrases
