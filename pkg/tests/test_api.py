import pytest
from fastapi.testclient import TestClient

from src.main import app
from src.repositories.synthetic_repository import load_synthetic


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture(scope="module")
def corpus():
    return load_synthetic(40, seed=1)


class TestStatus:
    def test_health(self, client):
        response = client.get("/api/status")
        assert response.status_code == 200
        assert response.json() == {"status": "healthy", "version": "1.0.0"}
        assert "X-Request-ID" in response.headers


class TestReductions:
    def test_svd(self, client, corpus):
        response = client.post("/api/reductions", json={"documents": list(corpus.documents), "method": "SVD", "k": 2})
        assert response.status_code == 200
        body = response.json()
        assert body["method"] == "SVD"
        assert len(body["rows"]) == 40 and len(body["rows"][0]) == 2
        assert body["vocabulary_size"] > 0

    def test_fuzzy_rows_are_memberships(self, client, corpus):
        response = client.post(
            "/api/reductions", json={"documents": list(corpus.documents), "method": "FC", "k": 2, "q": 2.0, "seed": 3}
        )
        assert response.status_code == 200
        for row in response.json()["rows"]:
            assert sum(row) == pytest.approx(1.0)

    def test_k_too_large(self, client, corpus):
        response = client.post("/api/reductions", json={"documents": list(corpus.documents), "method": "SVD", "k": 500})
        assert response.status_code == 400
        assert response.json()["detail"]["status_code"] == 400

    def test_request_validation(self, client, corpus):
        response = client.post("/api/reductions", json={"documents": list(corpus.documents), "k": 0})
        assert response.status_code == 422


class TestEvaluations:
    def test_cross_validation_report(self, client, corpus):
        payload = {
            "documents": list(corpus.documents),
            "labels": list(corpus.labels),
            "method": "FC",
            "k": 2,
            "q": 1.5,
            "classifiers": ["linear", "adaboost"],
            "folds": 3,
            "seed": 2,
        }
        response = client.post("/api/evaluations", json=payload)
        assert response.status_code == 200
        reports = response.json()["reports"]
        assert [r["classifier"] for r in reports] == ["linear", "adaboost"]
        for report in reports:
            assert report["method"] == "FC-1.5"
            assert len(report["fold_accuracies"]) == len(report["confusions"]) == 3
            assert sum(sum(cm.values()) for cm in report["confusions"]) == 40

    def test_single_class(self, client, corpus):
        payload = {"documents": list(corpus.documents), "labels": [1] * 40, "method": "SVD", "k": 2}
        response = client.post("/api/evaluations", json=payload)
        assert response.status_code == 422


class TestValidity:
    def test_scan(self, client, corpus):
        response = client.post("/api/validity", json={"documents": list(corpus.documents), "ks": [2, 3]})
        assert response.status_code == 200
        body = response.json()
        assert sorted(body["scores"]) == ["2", "3"]
        assert body["best_k"] in (2, 3)
