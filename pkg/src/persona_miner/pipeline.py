"""End-to-end batch pipeline: ingest -> encode -> reduce -> cluster ->
validate -> trajectories -> unique -> mine -> personas -> figures, writing
every intermediate to an output directory plus a manifest with file hashes.

The manifest contains no timestamps, so a rerun with the same corpus, config
and seed produces byte-identical artifacts and manifest.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bundle import (StyleModel, fit_cluster, needs_standardization, save_bundle,
                     write_matrix_csv)
from .features import EncoderKind, encode_corpus, feature_column_names, standardize
from .pca import pca_fit, pca_transform
from .rooms import Corpus, parse_corpus
from .seqmine import (PersonaReport, SequenceDb, branch_annotation, extract_archetypes,
                      gsp_mine, relative_min_support)
from .svg import render_cluster_scatter, render_path_diagram
from .trajectory import FilterConfig, Trajectory, filter_border, to_path

log = logging.getLogger("persona_miner.pipeline")

STAGES = ("encode", "reduce", "cluster", "validate", "trajectories",
          "unique", "mine", "personas", "figures")


@dataclass(frozen=True)
class PipelineConfig:
    encoder: EncoderKind = EncoderKind.TILES
    pca_k: int = 2
    algorithm: str = "kmeans"
    k: int = 12
    eps: float | None = None
    min_pts: int = 5
    theta: int = 3
    min_support: float = 0.15   # < 1 means a fraction of the sequence count
    top_k: int = 4
    mode: str = "gapped"
    min_branch_freq: int = 3
    seed: int = 0

    def to_json_dict(self) -> dict:
        doc = asdict(self)
        doc["encoder"] = self.encoder.value
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PipelineConfig":
        doc = dict(doc)
        doc["encoder"] = EncoderKind(doc.get("encoder", "tiles"))
        return cls(**doc)


class PipelineStageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _dump_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=1) + "\n")


def resolve_min_support(min_support: float, db_size: int) -> int:
    if min_support < 1:
        return relative_min_support(db_size, min_support)
    return int(min_support)


def session_trajectories(index, labels) -> list[Trajectory]:
    """Group per-row cluster labels back into per-session trajectories.

    `index` is the feature-matrix row index of (session_id, step) pairs in
    corpus order.
    """
    out: list[Trajectory] = []
    current: str | None = None
    ids: list[int] = []
    for (sid, _step), label in zip(index, labels):
        if sid != current:
            if current is not None:
                out.append(Trajectory(current, tuple(ids)))
            current, ids = sid, []
        ids.append(int(label))
    if current is not None:
        out.append(Trajectory(current, tuple(ids)))
    return out


def build_model_card(model: StyleModel, corpus: Corpus, index) -> dict:
    """Cluster count, sizes, 2-D centroids, and a representative room per
    cluster (the training step nearest the centroid)."""
    labels = model.cluster.labels
    grids = {}
    for session in corpus.sessions:
        for step in session.steps:
            grids[(session.session_id, step.index)] = step.grid.to_string()
    clusters = []
    for cid in range(model.cluster.n_clusters):
        members = np.flatnonzero(labels == cid)
        if model.cluster.algorithm == "kmeans":
            centroid = model.cluster.centroids[cid]
        else:
            centroid = model.embedding[members].mean(axis=0)
        d2 = ((model.embedding[members] - centroid) ** 2).sum(axis=1)
        best = int(members[int(d2.argmin())])
        sid, step = index[best]
        clusters.append({
            "id": cid,
            "size": int(members.size),
            "centroid": [float(v) for v in centroid],
            "exemplar_session": sid,
            "exemplar_step": int(step),
            "exemplar_grid": grids[(sid, step)],
        })
    noise = int((labels < 0).sum())
    return {"algorithm": model.cluster.algorithm, "encoder": model.encoder.value,
            "n_clusters": model.cluster.n_clusters, "n_rows": int(labels.size),
            "noise_rows": noise, "clusters": clusters}


def run_pipeline(corpus, config: PipelineConfig, out_dir: Path) -> dict:
    """Run all stages, writing artifacts and a manifest into out_dir.

    Returns the manifest. Raises PipelineStageError naming the failing stage;
    artifacts from completed stages are left in place.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not isinstance(corpus, Corpus):
        corpus = parse_corpus(Path(corpus).read_bytes())

    manifest_stages = []

    def record(stage: str, *files: Path) -> None:
        manifest_stages.append({
            "name": stage,
            "files": [{"path": f.name, "sha256": _sha256(f)} for f in files],
        })
        log.info("stage %s wrote %s", stage, ", ".join(f.name for f in files))

    stage = "encode"
    try:
        X, index = encode_corpus(corpus, config.encoder)
        f_feat = out / "features.csv"
        header = ",".join(feature_column_names(config.encoder))
        with f_feat.open("w") as fh:
            fh.write(header + "\n")
            for row in X:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        f_index = out / "features_index.json"
        _dump_json(f_index, {"encoder": config.encoder.value,
                             "rows": [{"session_id": sid, "step": step}
                                      for sid, step in index]})
        record(stage, f_feat, f_index)

        stage = "reduce"
        scaler_mean = scaler_std = None
        X_in = X
        if needs_standardization(config.encoder):
            X_in, scaler_mean, scaler_std = standardize(X)
        pca = pca_fit(X_in, config.pca_k)
        embedding = pca_transform(pca, X_in)
        f_scaler = out / "scaler.json"
        _dump_json(f_scaler, None if scaler_mean is None else
                   {"mean": scaler_mean.tolist(), "std": scaler_std.tolist()})
        f_pca = out / "pca.json"
        _dump_json(f_pca, pca.to_json_dict())
        f_emb = out / "embedding.csv"
        write_matrix_csv(f_emb, embedding)
        record(stage, f_scaler, f_pca, f_emb)

        stage = "cluster"
        cluster = fit_cluster(embedding, config.algorithm, k=config.k, eps=config.eps,
                              min_pts=config.min_pts, seed=config.seed)
        model = StyleModel(encoder=config.encoder, scaler_mean=scaler_mean,
                           scaler_std=scaler_std, pca=pca, cluster=cluster,
                           embedding=embedding, theta=config.theta)
        f_cluster = out / "cluster.json"
        _dump_json(f_cluster, cluster.to_json_dict())
        f_labels = out / "labels.csv"
        with f_labels.open("w") as fh:
            fh.write("row,session_id,step,label\n")
            for i, ((sid, step), lab) in enumerate(zip(index, cluster.labels)):
                fh.write(f"{i},{sid},{step},{int(lab)}\n")
        save_bundle(out, model)  # bundle.json + embedding.csv (rewritten identically)
        f_bundle = out / "bundle.json"
        f_card = out / "model_card.json"
        _dump_json(f_card, build_model_card(model, corpus, index))
        record(stage, f_cluster, f_labels, f_bundle, f_card)

        stage = "validate"
        from .validation import compute_indices
        report_doc: dict
        try:
            indices = compute_indices(embedding, cluster.labels)
            report_doc = indices.to_json_dict()
        except ValueError as e:
            report_doc = {"error": str(e)}
        f_val = out / "validation.json"
        _dump_json(f_val, report_doc)
        record(stage, f_val)

        stage = "trajectories"
        trajs = session_trajectories(index, cluster.labels)
        fc = FilterConfig(theta=config.theta)
        f_traj = out / "trajectories.jsonl"
        with f_traj.open("w") as fh:
            for traj in trajs:
                filtered = filter_border(traj, fc)
                doc = {"session_id": traj.session_id,
                       "raw": list(traj.cluster_ids),
                       "filtered": list(filtered.cluster_ids),
                       "path": list(to_path(traj, fc).path)}
                fh.write(json.dumps(doc) + "\n")
        record(stage, f_traj)

        stage = "unique"
        from .trajectory import unique_trajectories
        uniques = unique_trajectories(trajs, fc)
        f_unique = out / "unique.json"
        _dump_json(f_unique, [{"path": list(u.path), "multiplicity": u.multiplicity}
                              for u in uniques])
        record(stage, f_unique)

        stage = "mine"
        paths = [to_path(t, fc) for t in trajs]
        db = SequenceDb.from_paths(paths)
        min_support = resolve_min_support(config.min_support, len(db))
        patterns = gsp_mine(db, min_support, config.mode)
        f_patterns = out / "patterns.json"
        _dump_json(f_patterns, {"min_support": min_support, "mode": config.mode,
                                "patterns": [{"items": list(p.items), "support": p.support}
                                             for p in patterns]})
        record(stage, f_patterns)

        stage = "personas"
        report = extract_archetypes(db, min_support, top_k=config.top_k, mode=config.mode)
        report = branch_annotation(db, report, config.min_branch_freq)
        f_personas = out / "personas.json"
        _dump_json(f_personas, report.to_json_dict())
        record(stage, f_personas)

        stage = "figures"
        f_scatter = out / "scatter.svg"
        f_scatter.write_text(render_cluster_scatter(embedding, cluster.labels))
        f_paths = out / "paths.svg"
        f_paths.write_text(render_path_diagram(report))
        record(stage, f_scatter, f_paths)
    except PipelineStageError:
        raise
    except Exception as e:
        raise PipelineStageError(stage, e) from e

    manifest = {
        "tool": "persona-miner",
        "version": __version__,
        "config": config.to_json_dict(),
        "stages": manifest_stages,
    }
    _dump_json(out / "manifest.json", manifest)
    return manifest


def load_personas(path: Path) -> PersonaReport:
    return PersonaReport.from_json_dict(json.loads(Path(path).read_text()))
