"""Internal cluster-validation indices (silhouette, Davies-Bouldin,
Calinski-Harabasz) and the grid search comparing encoder/reduction/algorithm
setups end to end."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .bundle import fit_cluster, needs_standardization
from .features import EncoderKind, encode_corpus, standardize
from .pca import pca_fit, pca_transform
from .rooms import Corpus

log = logging.getLogger("persona_miner.validation")


@dataclass(frozen=True)
class IndexReport:
    silhouette: float
    davies_bouldin: float
    calinski_harabasz: float

    def to_json_dict(self) -> dict:
        def enc(v: float):
            return "Infinity" if math.isinf(v) else v
        return {"silhouette": self.silhouette,
                "davies_bouldin": self.davies_bouldin,
                "calinski_harabasz": enc(self.calinski_harabasz)}


def _non_noise(X: np.ndarray, labels: np.ndarray):
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    mask = labels >= 0
    return X[mask], labels[mask]


def _relabel(labels: np.ndarray):
    uniq = np.unique(labels)
    remap = {int(v): i for i, v in enumerate(uniq)}
    return np.array([remap[int(v)] for v in labels], dtype=np.int64), len(uniq)


def silhouette_score(X: np.ndarray, labels: np.ndarray) -> float:
    """Mean of (b - a) / max(a, b); singleton clusters contribute 0.

    Noise rows (label -1) are excluded. Distance sums are accumulated in
    chunks so the full pairwise matrix is never materialized.
    """
    Xv, lv = _non_noise(X, labels)
    rel, k = _relabel(lv)
    if k < 2:
        raise ValueError(f"silhouette needs >= 2 clusters, got {k}")
    Xv = Xv - Xv.mean(axis=0)  # centering keeps the distance identity accurate
    n = Xv.shape[0]
    counts = np.bincount(rel, minlength=k).astype(np.float64)
    onehot = np.zeros((n, k))
    onehot[np.arange(n), rel] = 1.0

    sums = np.empty((n, k))
    sq = (Xv * Xv).sum(axis=1)
    chunk = max(1, min(n, 2 ** 22 // max(n, 1)))
    for start in range(0, n, chunk):
        block = Xv[start:start + chunk]
        d2 = sq[start:start + chunk][:, None] + sq[None, :] - 2.0 * block @ Xv.T
        np.clip(d2, 0.0, None, out=d2)
        sums[start:start + chunk] = np.sqrt(d2) @ onehot

    own = counts[rel]
    s = np.zeros(n)
    multi = own > 1
    a = np.zeros(n)
    a[multi] = sums[np.arange(n), rel][multi] / (own[multi] - 1)
    mean_other = sums / counts[None, :]
    mean_other[np.arange(n), rel] = np.inf
    b = mean_other.min(axis=1)
    s[multi] = (b[multi] - a[multi]) / np.maximum(a[multi], b[multi])
    return float(s.mean())


def davies_bouldin(X: np.ndarray, labels: np.ndarray) -> float:
    """Mean over clusters of the worst (sigma_i + sigma_j) / centroid gap."""
    Xv, lv = _non_noise(X, labels)
    rel, k = _relabel(lv)
    if k < 2:
        raise ValueError(f"davies-bouldin needs >= 2 clusters, got {k}")
    centroids = np.vstack([Xv[rel == i].mean(axis=0) for i in range(k)])
    sigma = np.array([
        float(np.sqrt(((Xv[rel == i] - centroids[i]) ** 2).sum(axis=1)).mean())
        for i in range(k)])
    total = 0.0
    for i in range(k):
        worst = 0.0
        for j in range(k):
            if i == j:
                continue
            gap = float(np.sqrt(((centroids[i] - centroids[j]) ** 2).sum()))
            if gap == 0.0:
                raise ValueError(f"clusters {i} and {j} have coincident centroids")
            worst = max(worst, (sigma[i] + sigma[j]) / gap)
        total += worst
    return float(total / k)


def calinski_harabasz(X: np.ndarray, labels: np.ndarray) -> float:
    """Between-group over within-group dispersion ratio; +inf when the
    within-group dispersion is exactly zero."""
    Xv, lv = _non_noise(X, labels)
    rel, k = _relabel(lv)
    if k < 2:
        raise ValueError(f"calinski-harabasz needs >= 2 clusters, got {k}")
    n = Xv.shape[0]
    if n <= k:
        raise ValueError(f"calinski-harabasz needs n > k, got n={n}, k={k}")
    mean = Xv.mean(axis=0)
    W = 0.0
    B = 0.0
    for i in range(k):
        members = Xv[rel == i]
        c = members.mean(axis=0)
        W += float(((members - c) ** 2).sum())
        B += len(members) * float(((c - mean) ** 2).sum())
    if W == 0.0:
        return math.inf
    return (B / (k - 1)) / (W / (n - k))


def compute_indices(X: np.ndarray, labels: np.ndarray) -> IndexReport:
    return IndexReport(
        silhouette=silhouette_score(X, labels),
        davies_bouldin=davies_bouldin(X, labels),
        calinski_harabasz=calinski_harabasz(X, labels),
    )


@dataclass(frozen=True)
class GridSetup:
    encoder: EncoderKind
    pca_k: int
    algorithm: str
    k: int | None = None
    eps: float | None = None
    min_pts: int = 5
    seed: int = 0

    @property
    def param(self):
        return self.k if self.k is not None else self.eps


@dataclass(frozen=True)
class GridSearchRow:
    setup: GridSetup
    indices: IndexReport | None
    error: str | None = None


def grid_search(corpus: Corpus, setups, primary: str = "silhouette") -> list[GridSearchRow]:
    """Evaluate every setup end to end and sort by the primary index.

    Per-setup failures become error rows and the search continues. Encoded
    matrices, PCA projections and agglomerative merge sequences are cached
    across setups.
    """
    from .cluster import agglomerative_merges, cut_merges

    encoded: dict = {}
    reduced: dict = {}
    merges_cache: dict = {}

    def embedding_for(encoder: EncoderKind, pca_k: int) -> np.ndarray:
        key = (encoder, pca_k)
        if key not in reduced:
            if encoder not in encoded:
                X, _idx = encode_corpus(corpus, encoder)
                if needs_standardization(encoder):
                    X, _m, _s = standardize(X)
                encoded[encoder] = X
            model = pca_fit(encoded[encoder], pca_k)
            reduced[key] = pca_transform(model, encoded[encoder])
        return reduced[key]

    rows = []
    for setup in setups:
        try:
            emb = embedding_for(setup.encoder, setup.pca_k)
            if setup.algorithm.startswith("agglo-"):
                mkey = (setup.encoder, setup.pca_k, setup.algorithm)
                if mkey not in merges_cache:
                    merges_cache[mkey] = agglomerative_merges(
                        emb, setup.algorithm.removeprefix("agglo-"))
                if setup.k is None or setup.k < 1 or setup.k > emb.shape[0]:
                    raise ValueError(f"k must be in [1, n], got {setup.k}")
                labels = cut_merges(emb.shape[0], merges_cache[mkey], setup.k)
            else:
                model = fit_cluster(emb, setup.algorithm, k=setup.k, eps=setup.eps,
                                    min_pts=setup.min_pts, seed=setup.seed)
                labels = model.labels
            rows.append(GridSearchRow(setup=setup, indices=compute_indices(emb, labels)))
        except Exception as e:  # noqa: BLE001 - error rows by design
            log.warning("setup %s failed: %s", setup, e)
            rows.append(GridSearchRow(setup=setup, error=str(e), indices=None))

    def sort_key(item):
        i, row = item
        if row.indices is None:
            return (1, 0.0, i)
        value = getattr(row.indices, primary)
        # lower Davies-Bouldin is better; the other indices sort descending
        return (0, value if primary == "davies_bouldin" else -value, i)

    return [row for _i, row in sorted(enumerate(rows), key=lambda it: sort_key((it[0], it[1])))]


def _fmt(v: float) -> str:
    return "inf" if math.isinf(v) else f"{v:.3f}"


def gridsearch_table(rows: list[GridSearchRow]) -> str:
    """Fixed-width report with the columns algorithm / data / K / the three indices."""
    header = (f"{'Algorithm':<16}{'Data':<20}{'K':<8}"
              f"{'Silhouette':<12}{'DaviesBouldin':<15}{'CalinskiHarabasz':<17}")
    lines = [header, "-" * len(header)]
    for row in rows:
        s = row.setup
        data = f"{s.encoder.value}-pca{s.pca_k}"
        param = s.param if s.param is not None else "-"
        if row.indices is None:
            lines.append(f"{s.algorithm:<16}{data:<20}{param:<8}error: {row.error}")
        else:
            r = row.indices
            lines.append(f"{s.algorithm:<16}{data:<20}{param:<8}"
                         f"{_fmt(r.silhouette):<12}{_fmt(r.davies_bouldin):<15}"
                         f"{_fmt(r.calinski_harabasz):<17}")
    return "\n".join(lines) + "\n"


def gridsearch_csv(rows: list[GridSearchRow]) -> str:
    lines = ["algorithm,data,k,silhouette,davies_bouldin,calinski_harabasz,error"]
    for row in rows:
        s = row.setup
        data = f"{s.encoder.value}-pca{s.pca_k}"
        param = s.param if s.param is not None else ""
        if row.indices is None:
            lines.append(f"{s.algorithm},{data},{param},,,,\"{row.error}\"")
        else:
            r = row.indices
            lines.append(f"{s.algorithm},{data},{param},{float(r.silhouette)!r},"
                         f"{float(r.davies_bouldin)!r},{float(r.calinski_harabasz)!r},")
    return "\n".join(lines) + "\n"
