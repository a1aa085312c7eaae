import numpy as np
import pytest
from fastapi.testclient import TestClient

from lfx.service import app

client = TestClient(app)


@pytest.fixture(scope="module")
def tiny_corpus(tmp_path_factory):
    """Small synth corpus, preprocessed, shared across service tests."""
    out = str(tmp_path_factory.mktemp("run"))
    cfg = {"out_dir": out, "n_real": 5, "n_fake": 5, "frames": 650, "seed": 3}
    r = client.post("/synth", json=cfg)
    assert r.status_code == 200, r.text
    r = client.post("/preprocess", json=cfg)
    assert r.status_code == 200, r.text
    assert r.json() == {
        "segments_dir": f"{out}/segments", "videos": 10, "segments": 10, "dropped": 0,
    }
    return out, cfg


def test_health():
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"


def test_synth_reports_row_count(tmp_path):
    cfg = {"out_dir": str(tmp_path), "n_real": 2, "n_fake": 2, "frames": 50}
    r = client.post("/synth", json=cfg)
    assert r.status_code == 200
    body = r.json()
    assert body["videos"] == 4 and body["rows"] == 200


def test_preprocess_drops_short_videos(tmp_path):
    cfg = {"out_dir": str(tmp_path), "n_real": 2, "n_fake": 2, "frames": 599}
    assert client.post("/synth", json=cfg).status_code == 200
    r = client.post("/preprocess", json=cfg)
    assert r.status_code == 200
    assert r.json()["segments"] == 0 and r.json()["dropped"] == 4


def test_preprocess_schema_violation_is_422(tmp_path):
    cfg = {"out_dir": str(tmp_path)}
    (tmp_path / "labels.csv").write_text("video_id,label\nv1,0\n")
    (tmp_path / "landmarks.csv").write_text("bad,header\n1,2\n")
    r = client.post("/preprocess", json=cfg)
    assert r.status_code == 422
    assert "header" in r.json()["detail"]


def test_train_validation_rejects_unknown_model():
    r = client.post("/train", json={"model": "svm"})
    assert r.status_code == 422


def test_train_and_report_flow(tiny_corpus):
    out, cfg = tiny_corpus
    train_cfg = dict(cfg, model="rnn", epochs=1, batch_size=4,
                     lstm_units=[6], lr=0.001)
    r = client.post("/train", json=train_cfg)
    assert r.status_code == 200, r.text
    body = r.json()
    assert body["kind"] == "rnn"
    assert body["test_samples"] == 1
    for key in ("accuracy", "precision", "recall", "f1", "roc_auc"):
        assert 0.0 <= body[key] <= 1.0

    r = client.post("/report", json={"run_dir": out})
    assert r.status_code == 200
    rows = r.json()
    assert len(rows) == 1 and rows[0]["kind"] == "rnn"


def test_report_empty_dir_is_422(tmp_path):
    r = client.post("/report", json={"run_dir": str(tmp_path)})
    assert r.status_code == 422


def test_train_missing_store_is_500(tmp_path):
    r = client.post("/train", json={"out_dir": str(tmp_path / "nope")})
    assert r.status_code == 500
