"""Principal component analysis via eigendecomposition of the sample covariance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray                # (d,)
    components: np.ndarray          # (k, d), rows orthonormal
    explained_variance: np.ndarray  # (k,), non-increasing
    n_components: int

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
            "n_components": self.n_components,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PcaModel":
        return cls(
            mean=np.asarray(doc["mean"], dtype=np.float64),
            components=np.asarray(doc["components"], dtype=np.float64),
            explained_variance=np.asarray(doc["explained_variance"], dtype=np.float64),
            n_components=int(doc["n_components"]),
        )


def pca_fit(X: np.ndarray, k: int) -> PcaModel:
    """Top-k principal axes of X (covariance divisor n-1).

    Sign convention: each component's largest-absolute entry is positive
    (ties resolved toward the lowest index), making the fit deterministic.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D matrix")
    n, d = X.shape
    if n < 2:
        raise ValueError(f"need at least 2 rows to fit, got {n}")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite entries")
    if k < 1 or k > min(n - 1, d):
        raise ValueError(f"k must be in [1, min(n-1, d)] = [1, {min(n - 1, d)}], got {k}")

    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order][:k], 0.0, None)
    components = eigvecs[:, order][:, :k].T.copy()
    for row in components:
        pivot = int(np.argmax(np.abs(row)))
        if row[pivot] < 0:
            row *= -1.0
    return PcaModel(mean=mean, components=components,
                    explained_variance=eigvals, n_components=k)


def pca_transform(model: PcaModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return (X - model.mean) @ model.components.T


def pca_inverse(model: PcaModel, Y: np.ndarray) -> np.ndarray:
    Y = np.asarray(Y, dtype=np.float64)
    return Y @ model.components + model.mean
