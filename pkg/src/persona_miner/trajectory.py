"""Map design sessions to cluster-id trajectories, filter out brief border
visits, and compress to unique style paths."""

from __future__ import annotations

from dataclasses import dataclass

from .bundle import StyleModel
from .rooms import DesignSession


@dataclass(frozen=True)
class FilterConfig:
    theta: int = 3

    def __post_init__(self):
        if self.theta < 1:
            raise ValueError(f"theta must be >= 1, got {self.theta}")


@dataclass(frozen=True)
class Trajectory:
    session_id: str
    cluster_ids: tuple


@dataclass(frozen=True)
class CompressedTrajectory:
    session_id: str
    path: tuple


@dataclass(frozen=True)
class UniquePath:
    path: tuple
    multiplicity: int


def assign_clusters(session: DesignSession, model: StyleModel) -> Trajectory:
    """Classify every step of a session through the fitted style model."""
    ids = tuple(model.classify_grid(step.grid) for step in session.steps)
    return Trajectory(session_id=session.session_id, cluster_ids=ids)


def runs_of(ids) -> list[tuple[int, int]]:
    """Run-length encoding: list of (cluster id, run length)."""
    out: list[tuple[int, int]] = []
    for cid in ids:
        if out and out[-1][0] == cid:
            out[-1] = (cid, out[-1][1] + 1)
        else:
            out.append((cid, 1))
    return out


def filter_border(traj: Trajectory, config: FilterConfig = FilterConfig()) -> Trajectory:
    """Drop runs shorter than theta steps, keeping surviving multiplicity.

    If every run is shorter than theta, the longest (earliest on ties) run is
    kept so the result is never empty.
    """
    runs = runs_of(traj.cluster_ids)
    kept = [(cid, ln) for cid, ln in runs if ln >= config.theta]
    if not kept:
        kept = [max(runs, key=lambda r: r[1])]  # max() keeps the earliest on ties
    ids = tuple(cid for cid, ln in kept for _ in range(ln))
    return Trajectory(session_id=traj.session_id, cluster_ids=ids)


def compress_ids(ids) -> tuple:
    """Collapse consecutive duplicate ids."""
    out = []
    for cid in ids:
        if not out or out[-1] != cid:
            out.append(cid)
    return tuple(out)


def compress(traj: Trajectory) -> CompressedTrajectory:
    return CompressedTrajectory(session_id=traj.session_id,
                                path=compress_ids(traj.cluster_ids))


def to_path(traj: Trajectory, config: FilterConfig = FilterConfig()) -> CompressedTrajectory:
    return compress(filter_border(traj, config))


def unique_trajectories(trajectories, config: FilterConfig = FilterConfig()) -> list[UniquePath]:
    """Border-filter and compress every trajectory, then deduplicate.

    Ordered by descending multiplicity, ties by path contents.
    """
    counts: dict[tuple, int] = {}
    for traj in trajectories:
        path = to_path(traj, config).path
        counts[path] = counts.get(path, 0) + 1
    return [UniquePath(path=path, multiplicity=mult)
            for path, mult in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))]
