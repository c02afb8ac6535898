"""Command-line interface: one subcommand per pipeline stage plus synth,
gridsearch, serve and the end-to-end run. Stages compose through files in a
shared output directory.

Errors print a single machine-parsable line ``ERROR:<CODE>: message`` to
stderr and exit nonzero. Set PERSONA_MINER_LOG to control log verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .bundle import load_bundle, needs_standardization, save_bundle, write_matrix_csv, StyleModel
from .cluster import ClusterModel
from .features import EncoderKind, encode_corpus, feature_column_names, standardize
from .pca import PcaModel, pca_fit, pca_transform
from .pipeline import (PipelineConfig, PipelineStageError, build_model_card,
                       resolve_min_support, run_pipeline, session_trajectories)
from .rooms import (Corpus, CorpusParseError, CorpusValidationError, parse_corpus,
                    serialize_corpus)
from .seqmine import (PersonaReport, SequenceDb, branch_annotation, extract_archetypes,
                      gsp_mine, personas_table)
from .svg import render_cluster_scatter, render_path_diagram
from .synth import (GeneratorConfig, PersonaSpec, default_personas, default_templates,
                    generate_corpus, synth_spec_from_json)
from .trajectory import FilterConfig, Trajectory, filter_border, to_path, unique_trajectories
from .validation import GridSetup, compute_indices, grid_search, gridsearch_csv, gridsearch_table

log = logging.getLogger("persona_miner.cli")

ENCODERS = {"tiles": EncoderKind.TILES, "dimensions": EncoderKind.DIMENSIONS,
            "inner": EncoderKind.INNER_CONTENT, "combined": EncoderKind.COMBINED}
ALGOS = ("kmeans", "kmedoids", "agglo-single", "agglo-average", "agglo-complete", "dbscan")


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _read_corpus(path: str) -> Corpus:
    p = Path(path)
    if not p.exists():
        raise CliError("IO", f"input file not found: {p}")
    return parse_corpus(p.read_bytes())


def _out_dir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_features(out: Path):
    index_doc = json.loads((out / "features_index.json").read_text())
    encoder = EncoderKind(index_doc["encoder"])
    rows = [(r["session_id"], r["step"]) for r in index_doc["rows"]]
    with (out / "features.csv").open() as fh:
        next(fh)  # header
        X = np.array([[float(v) for v in line.split(",")] for line in fh if line.strip()])
    return X, rows, encoder


def _load_embedding(out: Path) -> np.ndarray:
    from .bundle import read_matrix_csv
    return read_matrix_csv(out / "embedding.csv")


def _load_labels(out: Path):
    rows = []
    with (out / "labels.csv").open() as fh:
        next(fh)
        for line in fh:
            if not line.strip():
                continue
            _row, sid, step, label = line.rstrip("\n").split(",")
            rows.append((sid, int(step), int(label)))
    index = [(sid, step) for sid, step, _l in rows]
    labels = np.array([lab for _s, _t, lab in rows], dtype=np.int64)
    return index, labels


def _load_trajectory_paths(out: Path):
    paths = []
    with (out / "trajectories.jsonl").open() as fh:
        for line in fh:
            if line.strip():
                doc = json.loads(line)
                paths.append((doc["session_id"], tuple(doc["path"])))
    return paths


# --- subcommand implementations -------------------------------------------

def cmd_ingest(args) -> int:
    corpus = _read_corpus(args.input)
    out = _out_dir(args)
    (out / "corpus.json").write_bytes(serialize_corpus(corpus))
    print(f"ingested {len(corpus.sessions)} sessions / {corpus.total_steps} steps "
          f"-> {out / 'corpus.json'}")
    return 0


def cmd_synth(args) -> int:
    if args.spec_file:
        doc = json.loads(Path(args.spec_file).read_text())
        templates, personas, weights = synth_spec_from_json(doc)
    else:
        templates, personas, weights = default_templates(), default_personas(), None
    if args.branch_prob is not None:
        personas = [PersonaSpec(name=p.name, path=p.path,
                                steps_per_phase=p.steps_per_phase,
                                branch_probability=args.branch_prob,
                                branch_targets=p.branch_targets) for p in personas]
    config = GeneratorConfig(noise_rate=args.noise_rate)
    corpus = generate_corpus(personas, args.sessions, args.seed, weights=weights,
                             templates=templates, config=config)
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    Path(args.output).write_bytes(serialize_corpus(corpus))
    print(f"generated {len(corpus.sessions)} sessions / {corpus.total_steps} steps "
          f"-> {args.output}")
    return 0


def cmd_encode(args) -> int:
    corpus = _read_corpus(args.input)
    out = _out_dir(args)
    encoder = ENCODERS[args.encoder]
    X, index = encode_corpus(corpus, encoder)
    with (out / "features.csv").open("w") as fh:
        fh.write(",".join(feature_column_names(encoder)) + "\n")
        for row in X:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    (out / "features_index.json").write_text(json.dumps(
        {"encoder": encoder.value,
         "rows": [{"session_id": sid, "step": step} for sid, step in index]}, indent=1) + "\n")
    print(f"encoded {X.shape[0]} x {X.shape[1]} ({encoder.value}) -> {out}")
    return 0


def cmd_reduce(args) -> int:
    out = _out_dir(args)
    X, _rows, encoder = _load_features(out)
    scaler = None
    if needs_standardization(encoder):
        X, mean, std = standardize(X)
        scaler = {"mean": mean.tolist(), "std": std.tolist()}
    pca = pca_fit(X, args.pca_k)
    embedding = pca_transform(pca, X)
    (out / "scaler.json").write_text(json.dumps(scaler, indent=1) + "\n")
    (out / "pca.json").write_text(json.dumps(pca.to_json_dict(), indent=1) + "\n")
    write_matrix_csv(out / "embedding.csv", embedding)
    explained = ", ".join(f"{v:.4g}" for v in pca.explained_variance)
    print(f"reduced to {args.pca_k} components (explained variance: {explained}) -> {out}")
    return 0


def cmd_cluster(args) -> int:
    from .bundle import fit_cluster
    corpus = _read_corpus(args.input)
    out = _out_dir(args)
    _X, rows, encoder = _load_features(out)
    embedding = _load_embedding(out)
    scaler_doc = json.loads((out / "scaler.json").read_text())
    pca = PcaModel.from_json_dict(json.loads((out / "pca.json").read_text()))
    cluster = fit_cluster(embedding, args.algo, k=args.k, eps=args.eps,
                          min_pts=args.min_pts, seed=args.seed)
    model = StyleModel(
        encoder=encoder,
        scaler_mean=None if scaler_doc is None else np.asarray(scaler_doc["mean"]),
        scaler_std=None if scaler_doc is None else np.asarray(scaler_doc["std"]),
        pca=pca, cluster=cluster, embedding=embedding, theta=args.theta)
    (out / "cluster.json").write_text(json.dumps(cluster.to_json_dict(), indent=1) + "\n")
    with (out / "labels.csv").open("w") as fh:
        fh.write("row,session_id,step,label\n")
        for i, ((sid, step), lab) in enumerate(zip(rows, cluster.labels)):
            fh.write(f"{i},{sid},{step},{int(lab)}\n")
    save_bundle(out, model)
    (out / "model_card.json").write_text(
        json.dumps(build_model_card(model, corpus, rows), indent=1) + "\n")
    print(f"clustered with {args.algo}: {cluster.n_clusters} clusters -> {out}")
    return 0


def cmd_validate(args) -> int:
    out = _out_dir(args)
    embedding = _load_embedding(out)
    _index, labels = _load_labels(out)
    indices = compute_indices(embedding, labels)
    (out / "validation.json").write_text(json.dumps(indices.to_json_dict(), indent=1) + "\n")
    print(f"silhouette={indices.silhouette:.4f} "
          f"davies_bouldin={indices.davies_bouldin:.4f} "
          f"calinski_harabasz={indices.calinski_harabasz:.4f}")
    return 0


def cmd_gridsearch(args) -> int:
    corpus = _read_corpus(args.input)
    out = _out_dir(args)
    encoders = [ENCODERS[e.strip()] for e in args.encoders.split(",")]
    algos = [a.strip() for a in args.algos.split(",")]
    for algo in algos:
        if algo not in ALGOS:
            raise CliError("CONFIG", f"unknown algorithm {algo!r}")
    k_values = [int(v) for v in args.k_values.split(",")] if args.k_values else []
    eps_values = [float(v) for v in args.eps_values.split(",")] if args.eps_values else []
    setups = []
    for encoder in encoders:
        for algo in algos:
            if algo == "dbscan":
                for eps in eps_values or [0.5]:
                    setups.append(GridSetup(encoder=encoder, pca_k=args.pca_k,
                                            algorithm=algo, eps=eps,
                                            min_pts=args.min_pts, seed=args.seed))
            else:
                for k in k_values or [12]:
                    setups.append(GridSetup(encoder=encoder, pca_k=args.pca_k,
                                            algorithm=algo, k=k, seed=args.seed))
    rows = grid_search(corpus, setups, primary=args.primary)
    (out / "gridsearch.csv").write_text(gridsearch_csv(rows))
    table = gridsearch_table(rows)
    (out / "gridsearch.txt").write_text(table)
    print(table, end="")
    return 0


def cmd_trajectories(args) -> int:
    out = _out_dir(args)
    index, labels = _load_labels(out)
    trajs = session_trajectories(index, labels)
    fc = FilterConfig(theta=args.theta)
    with (out / "trajectories.jsonl").open("w") as fh:
        for traj in trajs:
            doc = {"session_id": traj.session_id,
                   "raw": list(traj.cluster_ids),
                   "filtered": list(filter_border(traj, fc).cluster_ids),
                   "path": list(to_path(traj, fc).path)}
            fh.write(json.dumps(doc) + "\n")
    uniques = unique_trajectories(trajs, fc)
    (out / "unique.json").write_text(json.dumps(
        [{"path": list(u.path), "multiplicity": u.multiplicity} for u in uniques],
        indent=1) + "\n")
    print(f"{len(trajs)} trajectories, {len(uniques)} unique paths (theta={args.theta})")
    return 0


def _db_from_dir(out: Path) -> SequenceDb:
    paths = _load_trajectory_paths(out)
    return SequenceDb(sequences=tuple(paths))


def cmd_mine(args) -> int:
    out = _out_dir(args)
    db = _db_from_dir(out)
    min_support = resolve_min_support(args.min_support, len(db))
    patterns = gsp_mine(db, min_support, args.mode)
    (out / "patterns.json").write_text(json.dumps(
        {"min_support": min_support, "mode": args.mode,
         "patterns": [{"items": list(p.items), "support": p.support} for p in patterns]},
        indent=1) + "\n")
    print(f"{len(patterns)} frequent patterns at support >= {min_support} ({args.mode})")
    return 0


def cmd_personas(args) -> int:
    out = _out_dir(args)
    db = _db_from_dir(out)
    min_support = resolve_min_support(args.min_support, len(db))
    report = extract_archetypes(db, min_support, top_k=args.top_k, mode=args.mode)
    report = branch_annotation(db, report, args.min_branch_freq)
    (out / "personas.json").write_text(json.dumps(report.to_json_dict(), indent=1) + "\n")
    print(personas_table(report), end="")
    return 0


def cmd_report(args) -> int:
    out = _out_dir(args)
    embedding = _load_embedding(out)
    _index, labels = _load_labels(out)
    report = PersonaReport.from_json_dict(json.loads((out / "personas.json").read_text()))
    (out / "scatter.svg").write_text(render_cluster_scatter(embedding, labels))
    (out / "paths.svg").write_text(render_path_diagram(report))
    print(personas_table(report), end="")
    print(f"figures -> {out / 'scatter.svg'}, {out / 'paths.svg'}")
    return 0


def cmd_run(args) -> int:
    corpus = _read_corpus(args.input)
    config = PipelineConfig(
        encoder=ENCODERS[args.encoder], pca_k=args.pca_k, algorithm=args.algo,
        k=args.k, eps=args.eps, min_pts=args.min_pts, theta=args.theta,
        min_support=args.min_support, top_k=args.top_k, mode=args.mode,
        min_branch_freq=args.min_branch_freq, seed=args.seed)
    manifest = run_pipeline(corpus, config, Path(args.output_dir))
    print(f"pipeline complete: {len(manifest['stages'])} stages -> {args.output_dir}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn
    from .service import create_app
    app = create_app(Path(args.model_dir),
                     persist_dir=Path(args.persist_dir) if args.persist_dir else None,
                     ui_dir=Path(args.ui_dir) if args.ui_dir else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# --- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="persona-miner",
        description="Cluster room design styles, map sessions to style "
                    "trajectories, and mine archetypical designer paths.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_dir(p):
        p.add_argument("--output-dir", required=True, help="artifact directory")

    def add_cluster_flags(p):
        p.add_argument("--algo", default="kmeans", choices=ALGOS)
        p.add_argument("--k", type=int, default=12)
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--min-pts", type=int, default=5)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("ingest", help="validate and normalize a corpus file")
    p.add_argument("--input", required=True)
    add_output_dir(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--sessions", type=int, default=180)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-rate", type=float, default=0.1)
    p.add_argument("--branch-prob", type=float, default=None)
    p.add_argument("--spec-file", default=None,
                   help="JSON file with custom templates and personas")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("encode", help="encode a corpus into feature vectors")
    p.add_argument("--input", required=True)
    p.add_argument("--encoder", default="tiles", choices=sorted(ENCODERS))
    add_output_dir(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("reduce", help="fit PCA on encoded features")
    p.add_argument("--pca-k", type=int, default=2)
    add_output_dir(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("cluster", help="cluster the reduced embedding")
    p.add_argument("--input", required=True, help="corpus file (for exemplars)")
    p.add_argument("--theta", type=int, default=3)
    add_cluster_flags(p)
    add_output_dir(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("validate", help="compute internal validation indices")
    add_output_dir(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gridsearch", help="compare setups end to end")
    p.add_argument("--input", required=True)
    p.add_argument("--encoders", default="tiles,dimensions,combined")
    p.add_argument("--algos", default="kmeans,agglo-single,agglo-average")
    p.add_argument("--k-values", default="6,9,12")
    p.add_argument("--eps-values", default=None)
    p.add_argument("--pca-k", type=int, default=2)
    p.add_argument("--min-pts", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--primary", default="silhouette",
                   choices=("silhouette", "davies_bouldin", "calinski_harabasz"))
    add_output_dir(p)
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("trajectories", help="map sessions to cluster trajectories")
    p.add_argument("--theta", type=int, default=3)
    add_output_dir(p)
    p.set_defaults(func=cmd_trajectories)

    p = sub.add_parser("mine", help="mine frequent style subsequences")
    p.add_argument("--min-support", type=float, default=0.15,
                   help="absolute count, or a fraction of sequences if < 1")
    p.add_argument("--mode", default="gapped", choices=("gapped", "contiguous"))
    add_output_dir(p)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("personas", help="extract archetypes and branches")
    p.add_argument("--min-support", type=float, default=0.15)
    p.add_argument("--mode", default="gapped", choices=("gapped", "contiguous"))
    p.add_argument("--top-k", type=int, default=4)
    p.add_argument("--min-branch-freq", type=int, default=3)
    add_output_dir(p)
    p.set_defaults(func=cmd_personas)

    p = sub.add_parser("report", help="render SVG figures from artifacts")
    add_output_dir(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("run", help="run the full pipeline")
    p.add_argument("--input", required=True)
    p.add_argument("--encoder", default="tiles", choices=sorted(ENCODERS))
    p.add_argument("--pca-k", type=int, default=2)
    p.add_argument("--theta", type=int, default=3)
    p.add_argument("--min-support", type=float, default=0.15)
    p.add_argument("--top-k", type=int, default=4)
    p.add_argument("--min-branch-freq", type=int, default=3)
    p.add_argument("--mode", default="gapped", choices=("gapped", "contiguous"))
    add_cluster_flags(p)
    add_output_dir(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="serve a model bundle over HTTP")
    p.add_argument("--model-dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8777)
    p.add_argument("--persist-dir", default=None,
                   help="append per-session JSON-lines logs here")
    p.add_argument("--ui-dir", default=None, help="serve a static editor UI from /ui")
    p.set_defaults(func=cmd_serve)
    return parser


_ERROR_CODES = {
    CorpusParseError: "PARSE",
    CorpusValidationError: "VALIDATION",
    PipelineStageError: "STAGE",
    FileNotFoundError: "IO",
    ValueError: "CONFIG",
}


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("PERSONA_MINER_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"ERROR:{e.code}: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - single CLI error boundary
        code = next((c for t, c in _ERROR_CODES.items() if isinstance(e, t)), "INTERNAL")
        log.debug("unhandled error", exc_info=True)
        print(f"ERROR:{code}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
