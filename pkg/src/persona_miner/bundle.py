"""The fitted style model bundle: encoder choice, optional standardization,
PCA, and cluster model plus its training embedding. Used by both the batch
pipeline and the live classification service."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cluster import (ClusterConfig, ClusterModel, DbscanParams, agglomerative_fit,
                      dbscan_fit, kmeans_fit, kmedoids_fit, predict_nearest)
from .features import EncoderKind, apply_standardize, encode_corpus, encode_grid, standardize
from .pca import PcaModel, pca_fit, pca_transform
from .rooms import Corpus, RoomGrid

BUNDLE_FORMAT_VERSION = 1

ALGORITHMS = ("kmeans", "kmedoids", "agglo-single", "agglo-average",
              "agglo-complete", "dbscan")


def needs_standardization(kind: EncoderKind) -> bool:
    # Tile channels share one scale; the tabular encoders mix counts and ratios.
    return kind != EncoderKind.TILES


@dataclass
class StyleModel:
    encoder: EncoderKind
    scaler_mean: np.ndarray | None
    scaler_std: np.ndarray | None
    pca: PcaModel
    cluster: ClusterModel
    embedding: np.ndarray
    theta: int = 3

    def encode_point(self, grid: RoomGrid) -> np.ndarray:
        vec = encode_grid(grid, self.encoder)[None, :]
        if self.scaler_mean is not None:
            vec = apply_standardize(vec, self.scaler_mean, self.scaler_std)
        return pca_transform(self.pca, vec)[0]

    def classify_grid(self, grid: RoomGrid) -> int:
        return predict_nearest(self.cluster, self.embedding, self.encode_point(grid))


def fit_style_model(corpus: Corpus, encoder: EncoderKind, pca_k: int,
                    algorithm: str, k: int | None = None,
                    eps: float | None = None, min_pts: int = 5,
                    seed: int = 0, theta: int = 3) -> tuple[StyleModel, list]:
    """Encode, (standardize,) reduce and cluster a corpus.

    Returns the model and the feature-matrix row index of
    (session_id, step_index) pairs.
    """
    X, index = encode_corpus(corpus, encoder)
    scaler_mean = scaler_std = None
    if needs_standardization(encoder):
        X, scaler_mean, scaler_std = standardize(X)
    model = pca_fit(X, pca_k)
    embedding = pca_transform(model, X)
    cluster = fit_cluster(embedding, algorithm, k=k, eps=eps, min_pts=min_pts, seed=seed)
    return StyleModel(encoder=encoder, scaler_mean=scaler_mean, scaler_std=scaler_std,
                      pca=model, cluster=cluster, embedding=embedding, theta=theta), index


def fit_cluster(X: np.ndarray, algorithm: str, k: int | None = None,
                eps: float | None = None, min_pts: int = 5, seed: int = 0) -> ClusterModel:
    if algorithm in ("kmeans", "kmedoids"):
        if k is None:
            raise ValueError(f"{algorithm} requires k")
        config = ClusterConfig(k=k, seed=seed)
        return kmeans_fit(X, config) if algorithm == "kmeans" else kmedoids_fit(X, config)
    if algorithm.startswith("agglo-"):
        if k is None:
            raise ValueError(f"{algorithm} requires k")
        return agglomerative_fit(X, k, linkage=algorithm.removeprefix("agglo-"))
    if algorithm == "dbscan":
        if eps is None:
            raise ValueError("dbscan requires eps")
        return dbscan_fit(X, DbscanParams(eps=eps, min_pts=min_pts))
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def save_bundle(directory: Path, model: StyleModel) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    doc = {
        "format_version": BUNDLE_FORMAT_VERSION,
        "encoder": model.encoder.value,
        "theta": model.theta,
        "scaler": (None if model.scaler_mean is None else
                   {"mean": model.scaler_mean.tolist(), "std": model.scaler_std.tolist()}),
        "pca": model.pca.to_json_dict(),
        "cluster": model.cluster.to_json_dict(),
    }
    (directory / "bundle.json").write_text(json.dumps(doc, indent=1))
    write_matrix_csv(directory / "embedding.csv", model.embedding)


def load_bundle(directory: Path) -> StyleModel:
    directory = Path(directory)
    doc = json.loads((directory / "bundle.json").read_text())
    if doc.get("format_version") != BUNDLE_FORMAT_VERSION:
        raise ValueError(f"unsupported bundle format_version {doc.get('format_version')!r}")
    scaler = doc.get("scaler")
    return StyleModel(
        encoder=EncoderKind(doc["encoder"]),
        scaler_mean=None if scaler is None else np.asarray(scaler["mean"], dtype=np.float64),
        scaler_std=None if scaler is None else np.asarray(scaler["std"], dtype=np.float64),
        pca=PcaModel.from_json_dict(doc["pca"]),
        cluster=ClusterModel.from_json_dict(doc["cluster"]),
        embedding=read_matrix_csv(directory / "embedding.csv"),
        theta=int(doc["theta"]),
    )


def write_matrix_csv(path: Path, X: np.ndarray) -> None:
    # repr() keeps the shortest round-tripping decimal form of each float
    lines = [",".join(repr(float(v)) for v in row) for row in np.atleast_2d(X)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_csv(path: Path) -> np.ndarray:
    rows = [[float(v) for v in line.split(",")]
            for line in Path(path).read_text().splitlines() if line]
    return np.asarray(rows, dtype=np.float64)
