import json

import pytest
from fastapi.testclient import TestClient

from persona_miner.seqmine import Archetype, BranchPoint, PersonaReport
from persona_miner.service import create_app, match_archetype_prefix, predict_next
from persona_miner.trajectory import FilterConfig, Trajectory, to_path


@pytest.fixture(scope="module")
def client(pipeline_dir):
    out, _manifest, _corpus = pipeline_dir
    return TestClient(create_app(out))


def reference_report():
    return PersonaReport(archetypes=(
        Archetype(name="structural-focus", items=(0, 8, 3, 7), support=40),
        Archetype(name="goal-oriented", items=(0, 8, 6), support=45),
        Archetype(name="split-central-focus", items=(0, 5, 6), support=44),
        Archetype(name="complex-balance", items=(8, 3, 6), support=38),
    ))


# --- prefix matching and prediction (pure logic) ----------------------------

def test_prefix_match_anchors_at_path_suffix():
    assert match_archetype_prefix((0, 8), (0, 8, 3, 7)) == 2
    assert match_archetype_prefix((0, 8), (8, 3, 6)) == 1
    assert match_archetype_prefix((0, 8), (0, 5, 6)) == 0
    assert match_archetype_prefix((5, 0, 8), (0, 8, 6)) == 2  # skipped opening
    assert match_archetype_prefix((0, 8, 6), (0, 8, 6)) == 3  # fully walked


def test_predicted_next_for_reference_paths():
    matched, predictions = predict_next((0, 8), reference_report())
    names = {m["archetype"]: m["matched_length"] for m in matched}
    assert names == {"structural-focus": 2, "goal-oriented": 2, "complex-balance": 1}
    by_cluster = {p["cluster"]: p["weight"] for p in predictions}
    # 3 follows for structural-focus (40) and complex-balance (38); 6 for goal-oriented
    assert by_cluster[3] == pytest.approx(78.0)
    assert by_cluster[6] == pytest.approx(45.0)
    assert predictions[0]["cluster"] == 3  # sorted by weight descending


def test_branch_targets_add_weight():
    report = PersonaReport(
        archetypes=(Archetype(name="a", items=(0, 8, 3), support=10),),
        branches=(BranchPoint(archetype_index=0, position=1, targets=((10, 7),)),))
    _matched, predictions = predict_next((0, 8), report)
    by_cluster = {p["cluster"]: p["weight"] for p in predictions}
    assert by_cluster == {3: 10.0, 10: 7.0}


def test_fully_matched_archetype_predicts_only_extensions():
    report = PersonaReport(
        archetypes=(Archetype(name="a", items=(0, 8), support=10),),
        branches=(BranchPoint(archetype_index=0, position=1, targets=((9, 4),),),))
    _matched, predictions = predict_next((0, 8), report)
    assert predictions == [{"cluster": 9, "weight": 4.0}]


# --- http endpoints ---------------------------------------------------------

def test_session_lifecycle_and_validation(client, templates):
    sid = client.post("/sessions").json()["session_id"]

    grid = templates[0].grid.to_string()
    resp = client.post(f"/sessions/{sid}/steps", json={"grid": grid})
    assert resp.status_code == 200
    body = resp.json()
    assert body["step_index"] == 0
    assert body["path"] == [body["cluster"]]
    assert all(w["weight"] >= 0 for w in body["predicted_next"])
    weights = [w["weight"] for w in body["predicted_next"]]
    assert weights == sorted(weights, reverse=True)

    stored = client.get(f"/sessions/{sid}").json()
    assert stored["steps"] == [grid]
    assert stored["trajectory"] == [body["cluster"]]


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope").status_code == 404
    resp = client.post("/sessions/nope/steps", json={"grid": "F" * 91})
    assert resp.status_code == 404


def test_invalid_grid_is_400_with_violations(client):
    sid = client.post("/sessions").json()["session_id"]
    resp = client.post(f"/sessions/{sid}/steps", json={"grid": "F" * 90})
    assert resp.status_code == 400
    assert resp.json()["violations"]
    resp = client.post(f"/sessions/{sid}/steps", json={"grid": "Z" + "F" * 90})
    assert resp.status_code == 400


def test_model_card_counts(client, pipeline_dir):
    _out, _manifest, corpus = pipeline_dir
    card = client.get("/model").json()
    assert card["n_clusters"] == 12
    assert sum(c["size"] for c in card["clusters"]) + card["noise_rows"] == \
        corpus.total_steps
    assert len(card["personas"]) >= 1


def test_model_centroids_match_offline_recomputation(client, pipeline_dir):
    import numpy as np
    from persona_miner.bundle import load_bundle

    out, _manifest, _corpus = pipeline_dir
    model = load_bundle(out)
    card = client.get("/model").json()
    for cluster in card["clusters"]:
        members = model.embedding[model.cluster.labels == cluster["id"]]
        direct = model.cluster.centroids[cluster["id"]]
        assert np.allclose(cluster["centroid"], direct, atol=1e-12)
        # centroid is the member mean up to Lloyd convergence tolerance
        assert np.allclose(members.mean(axis=0), direct, atol=1e-3)


def test_personas_endpoint_round_trips(client, pipeline_dir):
    out, _manifest, _corpus = pipeline_dir
    served = client.get("/personas").json()
    stored = json.loads((out / "personas.json").read_text())
    assert served == stored


def test_live_replay_equals_batch(client, pipeline_dir):
    from persona_miner.bundle import load_bundle
    from persona_miner.trajectory import assign_clusters

    out, _manifest, corpus = pipeline_dir
    model = load_bundle(out)
    fc = FilterConfig(theta=model.theta)
    for session in corpus.sessions[:5]:
        sid = client.post("/sessions").json()["session_id"]
        last = None
        for step in session.steps:
            resp = client.post(f"/sessions/{sid}/steps",
                               json={"grid": step.grid.to_string()})
            last = resp.json()
        batch = assign_clusters(session, model)
        live = client.get(f"/sessions/{sid}").json()
        assert tuple(live["trajectory"]) == batch.cluster_ids
        assert tuple(last["path"]) == to_path(batch, fc).path


def test_sessions_are_isolated(client, templates):
    a = client.post("/sessions").json()["session_id"]
    b = client.post("/sessions").json()["session_id"]
    ga = templates[0].grid.to_string()
    gb = templates[7].grid.to_string()
    # deterministically interleave the two sessions
    for _ in range(3):
        client.post(f"/sessions/{a}/steps", json={"grid": ga})
        client.post(f"/sessions/{b}/steps", json={"grid": gb})
    sa = client.get(f"/sessions/{a}").json()
    sb = client.get(f"/sessions/{b}").json()
    assert sa["steps"] == [ga] * 3
    assert sb["steps"] == [gb] * 3
    assert len(set(sa["trajectory"])) == 1
    assert len(set(sb["trajectory"])) == 1
    assert sa["trajectory"][0] != sb["trajectory"][0]


def test_persist_log_appends_steps(pipeline_dir, tmp_path, templates):
    out, _manifest, _corpus = pipeline_dir
    persist = tmp_path / "logs"
    client = TestClient(create_app(out, persist_dir=persist))
    sid = client.post("/sessions").json()["session_id"]
    grid = templates[0].grid.to_string()
    client.post(f"/sessions/{sid}/steps", json={"grid": grid})
    lines = [json.loads(line) for line in
             (persist / f"{sid}.jsonl").read_text().splitlines()]
    assert lines[0]["event"] == "created"
    assert lines[1]["event"] == "step" and lines[1]["grid"] == grid
