"""Clustering algorithms over feature matrices: K-Means (Lloyd + k-means++),
K-Medoids (PAM-style), agglomerative (single/average/complete linkage) and
DBSCAN, plus nearest-cluster prediction for live classification.

All fits are deterministic for a fixed seed; tie-breaking rules favor the
lowest index throughout so results are reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LINKAGES = ("single", "average", "complete")


@dataclass(frozen=True)
class ClusterConfig:
    k: int
    seed: int = 0
    max_iter: int = 300
    tol: float = 1e-6
    n_init: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.tol <= 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")


@dataclass(frozen=True)
class DbscanParams:
    eps: float
    min_pts: int = 5

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if self.min_pts < 1:
            raise ValueError(f"min_pts must be >= 1, got {self.min_pts}")


@dataclass
class ClusterModel:
    algorithm: str
    labels: np.ndarray
    centroids: np.ndarray | None = None
    medoid_indices: list | None = None
    inertia: float | None = None
    params: dict = field(default_factory=dict)

    @property
    def n_clusters(self) -> int:
        non_noise = self.labels[self.labels >= 0]
        return int(non_noise.max()) + 1 if non_noise.size else 0

    def members(self) -> dict:
        out: dict[int, list[int]] = {}
        for i, lab in enumerate(self.labels):
            out.setdefault(int(lab), []).append(i)
        return out

    def to_json_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "labels": [int(v) for v in self.labels],
            "centroids": self.centroids.tolist() if self.centroids is not None else None,
            "medoid_indices": list(self.medoid_indices) if self.medoid_indices is not None else None,
            "inertia": float(self.inertia) if self.inertia is not None else None,
            "params": self.params,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ClusterModel":
        return cls(
            algorithm=doc["algorithm"],
            labels=np.asarray(doc["labels"], dtype=np.int64),
            centroids=(np.asarray(doc["centroids"], dtype=np.float64)
                       if doc.get("centroids") is not None else None),
            medoid_indices=doc.get("medoid_indices"),
            inertia=doc.get("inertia"),
            params=doc.get("params", {}),
        )


def _dist2_to_points(X: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, (n, m) for n rows of X and m points."""
    sq = (X * X).sum(axis=1)[:, None] + (points * points).sum(axis=1)[None, :]
    d2 = sq - 2.0 * X @ points.T
    return np.clip(d2, 0.0, None)


def _kmeanspp_indices(X: np.ndarray, k: int, rng: np.random.Generator) -> list[int]:
    """k-means++ seeding; returns row indices of the chosen points."""
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = _dist2_to_points(X, X[chosen])[:, 0]
    while len(chosen) < k:
        total = d2.sum()
        if total <= 0:
            # all remaining mass at distance zero: take the lowest unchosen index
            taken = set(chosen)
            nxt = next(i for i in range(n) if i not in taken)
        else:
            nxt = int(rng.choice(n, p=d2 / total))
        chosen.append(nxt)
        d2 = np.minimum(d2, _dist2_to_points(X, X[[nxt]])[:, 0])
    return chosen


def kmeans_fit(X: np.ndarray, config: ClusterConfig) -> ClusterModel:
    """Lloyd's algorithm with k-means++ init and n_init restarts (lowest inertia).

    Empty clusters are re-seeded to the point farthest from its assigned
    centroid. Per-iteration inertia histories are kept in
    params["inertia_history"], one list per restart.
    """
    X = np.asarray(X, dtype=np.float64)
    n, k = X.shape[0], config.k
    if n < k:
        raise ValueError(f"need at least k={k} rows, got {n}")
    rng = np.random.default_rng(config.seed)

    best = None
    histories = []
    for _ in range(config.n_init):
        centers = X[_kmeanspp_indices(X, k, rng)].copy()
        history = []
        labels = np.zeros(n, dtype=np.int64)
        for _it in range(config.max_iter):
            d2 = _dist2_to_points(X, centers)
            labels = d2.argmin(axis=1)
            inertia = float(d2[np.arange(n), labels].sum())
            history.append(inertia)
            new_centers = centers.copy()
            for cid in range(k):
                mask = labels == cid
                if mask.any():
                    new_centers[cid] = X[mask].mean(axis=0)
            # re-seed empty clusters to the farthest point from its own centroid
            assigned_d2 = d2[np.arange(n), labels].copy()
            for cid in range(k):
                if not (labels == cid).any():
                    far = int(assigned_d2.argmax())
                    new_centers[cid] = X[far]
                    assigned_d2[far] = -1.0
            shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
            centers = new_centers
            if shift < config.tol:
                break
        d2 = _dist2_to_points(X, centers)
        labels = d2.argmin(axis=1)
        inertia = float(d2[np.arange(n), labels].sum())
        history.append(inertia)
        histories.append(history)
        if best is None or inertia < best[0]:
            best = (inertia, labels, centers)

    inertia, labels, centers = best
    return ClusterModel(
        algorithm="kmeans", labels=labels, centroids=centers, inertia=inertia,
        params={"k": k, "seed": config.seed, "max_iter": config.max_iter,
                "tol": config.tol, "n_init": config.n_init,
                "inertia_history": histories})


def kmedoids_fit(X: np.ndarray, config: ClusterConfig) -> ClusterModel:
    """PAM-style alternation: assign to nearest medoid, then move each medoid
    to its cluster's cost-minimizing member (sum of squared distances).

    Medoids are kept sorted by row index, so assignment ties and cluster ids
    resolve toward the lowest row index.
    """
    X = np.asarray(X, dtype=np.float64)
    n, k = X.shape[0], config.k
    if n < k:
        raise ValueError(f"need at least k={k} rows, got {n}")
    rng = np.random.default_rng(config.seed)
    sq_norms = (X * X).sum(axis=1)

    def cluster_cost_per_candidate(member_idx: np.ndarray) -> np.ndarray:
        # cost(j) = sum_i ||x_i - x_j||^2 = sum_i ||x_i||^2 + m ||x_j||^2 - 2 x_j . sum_i x_i
        pts = X[member_idx]
        s2 = sq_norms[member_idx].sum()
        sv = pts.sum(axis=0)
        return s2 + len(member_idx) * sq_norms[member_idx] - 2.0 * pts @ sv

    best = None
    for _ in range(config.n_init):
        medoids = sorted(_kmeanspp_indices(X, k, rng))
        for _it in range(config.max_iter):
            d2 = _dist2_to_points(X, X[medoids])
            labels = d2.argmin(axis=1)
            new_medoids = []
            for cid in range(k):
                members = np.flatnonzero(labels == cid)
                if members.size == 0:
                    new_medoids.append(medoids[cid])
                    continue
                costs = cluster_cost_per_candidate(members)
                new_medoids.append(int(members[int(costs.argmin())]))
            new_medoids = sorted(new_medoids)
            if new_medoids == medoids:
                break
            medoids = new_medoids
        d2 = _dist2_to_points(X, X[medoids])
        labels = d2.argmin(axis=1)
        cost = float(d2[np.arange(n), labels].sum())
        if best is None or cost < best[0]:
            best = (cost, labels, medoids)

    cost, labels, medoids = best
    return ClusterModel(
        algorithm="kmedoids", labels=labels, medoid_indices=list(medoids),
        centroids=X[medoids].copy(), inertia=cost,
        params={"k": k, "seed": config.seed, "max_iter": config.max_iter,
                "n_init": config.n_init})


def agglomerative_merges(X: np.ndarray, linkage: str) -> list[tuple[int, int]]:
    """Full merge sequence for hierarchical clustering under the given linkage.

    Each cluster is represented by its minimum member row index. Every merge
    picks the globally closest active pair; ties resolve to the pair with the
    smallest representative, then the smallest partner. Returns (kept,
    absorbed) representative pairs in merge order.

    Exact duplicate rows are collapsed up front: their zero-distance merges
    are always the greedy minimum, and the remaining dendrogram equals the
    size-weighted one over distinct points. Editing corpora dwell on repeated
    snapshots, so this keeps large inputs tractable.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}, got {linkage!r}")
    X = np.asarray(X, dtype=np.float64)
    n_rows = X.shape[0]
    if n_rows <= 1:
        return []

    groups: dict[bytes, list[int]] = {}
    for i in range(n_rows):
        groups.setdefault(X[i].tobytes(), []).append(i)
    members = list(groups.values())  # first-occurrence order; rep = min member
    merges = [(g[0], other) for g in members for other in g[1:]]
    reps = [g[0] for g in members]
    n = len(members)
    if n == 1:
        return merges

    U = np.vstack([X[g[0]] for g in members])
    D = np.sqrt(_dist2_to_points(U, U))
    np.fill_diagonal(D, np.inf)
    sizes = np.array([len(g) for g in members], dtype=np.int64)
    nn_dist = D.min(axis=1)
    nn_idx = D.argmin(axis=1)

    for _ in range(n - 1):
        m = nn_dist.min()
        a = int(np.flatnonzero(nn_dist == m)[0])
        b = int(np.flatnonzero(D[a] == m)[0])
        merges.append((reps[a], reps[b]))

        row_a, row_b = D[a], D[b]
        if linkage == "single":
            new_row = np.minimum(row_a, row_b)
        elif linkage == "complete":
            new_row = np.maximum(row_a, row_b)
        else:
            new_row = (sizes[a] * row_a + sizes[b] * row_b) / (sizes[a] + sizes[b])
        new_row[a] = np.inf
        new_row[b] = np.inf
        D[a, :] = new_row
        D[:, a] = new_row
        D[b, :] = np.inf
        D[:, b] = np.inf
        sizes[a] += sizes[b]
        nn_dist[b] = np.inf

        nn_dist[a] = D[a].min()
        nn_idx[a] = D[a].argmin()
        stale = np.flatnonzero((nn_idx == a) | (nn_idx == b))
        for i in stale:
            if i != a and nn_dist[i] != np.inf:
                nn_dist[i] = D[i].min()
                nn_idx[i] = D[i].argmin()
        improved = np.flatnonzero(D[:, a] < nn_dist)
        nn_dist[improved] = D[improved, a]
        nn_idx[improved] = a
    return merges


def cut_merges(n: int, merges: list, k: int) -> np.ndarray:
    """Labels after applying the first n-k merges; clusters numbered 0..k-1
    in order of their minimum member row index."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in merges[: n - k]:
        parent[find(b)] = find(a)

    roots: dict[int, int] = {}
    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        r = find(i)
        if r not in roots:
            roots[r] = len(roots)
        labels[i] = roots[r]
    return labels


def agglomerative_fit(X: np.ndarray, k: int, linkage: str = "single") -> ClusterModel:
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if k < 1 or n < k:
        raise ValueError(f"k must be in [1, n={n}], got {k}")
    merges = agglomerative_merges(X, linkage)
    labels = cut_merges(n, merges, k)
    return ClusterModel(algorithm=f"agglo-{linkage}", labels=labels,
                        params={"k": k, "linkage": linkage})


def dbscan_fit(X: np.ndarray, params: DbscanParams) -> ClusterModel:
    """Density clustering: clusters are eps-connected components of core
    points; border points join the lowest-id adjacent core cluster; the rest
    are noise (-1)."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    eps2 = params.eps * params.eps

    neighbors: list[np.ndarray] = []
    chunk = max(1, min(n, 2 ** 22 // max(n, 1)))
    for start in range(0, n, chunk):
        d2 = _dist2_to_points(X[start:start + chunk], X)
        for row in d2:
            neighbors.append(np.flatnonzero(row <= eps2))
    core = np.array([len(nb) >= params.min_pts for nb in neighbors])

    labels = np.full(n, -1, dtype=np.int64)
    cluster_id = 0
    for i in range(n):
        if not core[i] or labels[i] != -1:
            continue
        labels[i] = cluster_id
        queue = [i]
        while queue:
            p = queue.pop()
            for q in neighbors[p]:
                if core[q] and labels[q] == -1:
                    labels[q] = cluster_id
                    queue.append(q)
        cluster_id += 1

    for i in range(n):
        if core[i] or labels[i] != -1:
            continue
        adjacent = [int(labels[q]) for q in neighbors[i] if core[q]]
        if adjacent:
            labels[i] = min(adjacent)

    return ClusterModel(algorithm="dbscan", labels=labels,
                        params={"eps": params.eps, "min_pts": params.min_pts,
                                "core_indices": np.flatnonzero(core).tolist()},
                        centroids=None)


def predict_nearest(model: ClusterModel, X_train: np.ndarray | None, x: np.ndarray) -> int:
    """Cluster id for a new point: nearest centroid (K-Means), nearest medoid
    (K-Medoids), or the label of the nearest non-noise training row."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if model.algorithm == "kmeans":
        d2 = _dist2_to_points(x, model.centroids)[0]
        return int(d2.argmin())
    if model.algorithm == "kmedoids":
        d2 = _dist2_to_points(x, model.centroids)[0]
        return int(d2.argmin())
    if X_train is None:
        raise ValueError(f"{model.algorithm} prediction needs the training matrix")
    mask = model.labels >= 0
    if not mask.any():
        raise ValueError("model labeled every training row as noise; cannot predict")
    d2 = _dist2_to_points(x, np.asarray(X_train, dtype=np.float64)[mask])[0]
    return int(model.labels[mask][int(d2.argmin())])
