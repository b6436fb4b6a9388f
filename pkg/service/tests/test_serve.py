import pytest
from fastapi.testclient import TestClient

from quality_service.serve import create_app
from quality_service.thresholds import Thresholds, apply_thresholds


@pytest.fixture(scope="module")
def client(trained):
    _result, out_dir = trained
    return TestClient(create_app(out_dir, max_batch=64))


class TestScoreEndpoint:
    def test_order_preserving_contract(self, client):
        texts = ["404 not found. access denied.", "good words " * 40, ""]
        resp = client.post("/score", json={"texts": texts})
        assert resp.status_code == 200
        data = resp.json()
        assert set(data) == {"scores", "labels"}
        assert len(data["scores"]) == len(data["labels"]) == 3
        assert all(l in (1, 2, 3, 4, 5) for l in data["labels"])

    def test_empty_batch(self, client):
        resp = client.post("/score", json={"texts": []})
        assert resp.status_code == 200
        assert resp.json() == {"scores": [], "labels": []}

    def test_missing_texts_is_400(self, client):
        assert client.post("/score", json={"nope": []}).status_code == 400
        assert client.post("/score", content=b"{not json").status_code == 400
        assert client.post("/score", json={"texts": [1, 2]}).status_code == 400

    def test_oversize_batch_is_413(self, client):
        resp = client.post("/score", json={"texts": ["x"] * 65})
        assert resp.status_code == 413

    def test_server_side_truncation_to_2000_chars(self, client, trained):
        result, _ = trained
        long_text = "word " * 1200  # 6000 chars
        short = long_text[:2000]
        a = client.post("/score", json={"texts": [long_text]}).json()
        b = client.post("/score", json={"texts": [short]}).json()
        assert a["scores"] == b["scores"]

    def test_deterministic(self, client):
        texts = ["some stable input " * 10]
        first = client.post("/score", json={"texts": texts}).json()
        for _ in range(3):
            assert client.post("/score", json={"texts": texts}).json() == first

    def test_label_equals_thresholded_score(self, client, trained):
        result, out_dir = trained
        thresholds = Thresholds.load(out_dir / "thresholds.json")
        data = client.post("/score", json={"texts": ["alpha beta", "404 not found"]}).json()
        for score, label in zip(data["scores"], data["labels"]):
            assert label == apply_thresholds(score, thresholds)


class TestHealth:
    def test_health_reports_version(self, client, trained):
        result, _ = trained
        resp = client.get("/health")
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ok"
        assert body["model_version"] == result.bundle.version
