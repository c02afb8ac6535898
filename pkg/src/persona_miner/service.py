"""HTTP service for live style classification and next-style prediction.

Serves a fitted model bundle and persona report produced by the batch
pipeline. Sessions are held in memory (optionally appended to JSON-lines
logs); requests to one session serialize, and the model itself is immutable
while serving.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .bundle import StyleModel, load_bundle
from .rooms import RoomGrid, validate_grid
from .seqmine import PersonaReport
from .trajectory import FilterConfig, Trajectory, compress_ids, filter_border


@dataclass
class LiveSession:
    session_id: str
    grids: list = field(default_factory=list)
    cluster_ids: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


class StepBody(BaseModel):
    grid: str


def match_archetype_prefix(path: tuple, archetype: tuple) -> int:
    """Longest L such that the last L path elements equal the archetype's
    first L elements. Anchoring at any suffix lets paths that skip the
    archetype's opening still score a partial match."""
    for length in range(min(len(path), len(archetype)), 0, -1):
        if tuple(path[-length:]) == tuple(archetype[:length]):
            return length
    return 0


def predict_next(path: tuple, report: PersonaReport) -> tuple[list, list]:
    """(matched archetype prefixes, weighted next-cluster predictions).

    Next clusters from matching archetypes are weighted by archetype support;
    branch targets recorded at the matched position add their frequencies.
    """
    matched = []
    weights: dict[int, float] = {}
    branch_at = {(b.archetype_index, b.position): b.targets for b in report.branches}
    for ai, arch in enumerate(report.archetypes):
        length = match_archetype_prefix(path, arch.items)
        if length == 0:
            continue
        matched.append({"archetype": arch.name, "items": list(arch.items),
                        "matched_length": length})
        if length < len(arch.items):
            nxt = arch.items[length]
            weights[nxt] = weights.get(nxt, 0.0) + arch.support
        for target, count in branch_at.get((ai, length - 1), ()):
            weights[target] = weights.get(target, 0.0) + count
    predictions = [{"cluster": cid, "weight": w}
                   for cid, w in sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))]
    return matched, predictions


def create_app(model_dir: Path, persist_dir: Path | None = None,
               ui_dir: Path | None = None) -> FastAPI:
    model_dir = Path(model_dir)
    model: StyleModel = load_bundle(model_dir)
    report = PersonaReport.from_json_dict(
        json.loads((model_dir / "personas.json").read_text()))
    card = json.loads((model_dir / "model_card.json").read_text())
    card["personas"] = report.to_json_dict()["archetypes"]
    fc = FilterConfig(theta=model.theta)

    app = FastAPI(title="persona-miner service")
    sessions: dict[str, LiveSession] = {}
    registry_lock = threading.Lock()
    counter = {"n": 0}

    if persist_dir is not None:
        Path(persist_dir).mkdir(parents=True, exist_ok=True)

    def persist(session_id: str, doc: dict) -> None:
        if persist_dir is not None:
            with (Path(persist_dir) / f"{session_id}.jsonl").open("a") as fh:
                fh.write(json.dumps(doc) + "\n")

    def get_session(session_id: str) -> LiveSession:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404,
                                detail=f"unknown session {session_id!r}")
        return session

    @app.post("/sessions")
    def create_session():
        with registry_lock:
            counter["n"] += 1
            session_id = f"live-{counter['n']:04d}"
            sessions[session_id] = LiveSession(session_id=session_id)
        persist(session_id, {"event": "created", "session_id": session_id})
        return {"session_id": session_id}

    @app.post("/sessions/{session_id}/steps")
    def classify_step(session_id: str, body: StepBody):
        session = get_session(session_id)
        try:
            grid = RoomGrid.from_string(body.grid)
        except ValueError as e:
            return JSONResponse(status_code=400, content={
                "error": "invalid grid",
                "violations": [str(e)],
            })
        violations = validate_grid(grid)
        if violations:
            return JSONResponse(status_code=400, content={
                "error": "invalid grid",
                "violations": [v.message for v in violations],
            })
        with session.lock:
            cluster_id = model.classify_grid(grid)
            session.grids.append(body.grid)
            session.cluster_ids.append(cluster_id)
            traj = Trajectory(session_id, tuple(session.cluster_ids))
            path = compress_ids(filter_border(traj, fc).cluster_ids)
            step_index = len(session.grids) - 1
        matched, predictions = predict_next(path, report)
        persist(session_id, {"event": "step", "index": step_index, "grid": body.grid,
                             "cluster": cluster_id})
        return {
            "session_id": session_id,
            "step_index": step_index,
            "cluster": cluster_id,
            "path": list(path),
            "matched_archetypes": matched,
            "predicted_next": predictions,
        }

    @app.get("/sessions/{session_id}")
    def get_live_session(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return {
                "session_id": session_id,
                "steps": list(session.grids),
                "trajectory": list(session.cluster_ids),
            }

    @app.get("/model")
    def get_model_summary():
        return card

    @app.get("/personas")
    def get_personas():
        return report.to_json_dict()

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
