"""Feature encoders turning a room grid into the vector representations used
for clustering: per-tile color channels, five design-dimension metrics,
inner-content statistics, and their combination.

The design-dimension metrics (symmetry, linearity, leniency, pattern counts)
are concrete stand-in formulas chosen for determinism and testability; all
downstream machinery is agnostic to the exact definitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .rooms import GRID_CELLS, GRID_HEIGHT, GRID_WIDTH, Corpus, RoomGrid, TileType

# Injective single-color map for the pixel-tile encoding.
TILE_COLORS = {
    TileType.FLOOR: (0.0, 0.0, 0.0),
    TileType.WALL: (1.0, 1.0, 1.0),
    TileType.ENEMY: (1.0, 0.0, 0.0),
    TileType.BOSS: (0.5, 0.0, 0.0),
    TileType.TREASURE: (1.0, 1.0, 0.0),
    TileType.DOOR: (0.0, 0.0, 1.0),
}

_COLOR_LUT = np.array([TILE_COLORS[TileType(i)] for i in range(6)], dtype=np.float64)

# Tiles a player can stand on; walls are the only blocking tile.
WALKABLE = frozenset({TileType.FLOOR, TileType.ENEMY, TileType.BOSS,
                      TileType.TREASURE, TileType.DOOR})
ENEMY_CLASS = frozenset({TileType.ENEMY, TileType.BOSS})

# Four content classes: Boss folds into the enemy class, Door into floor.
CLASS_NAMES = ("enemy", "treasure", "floor", "wall")
_CLASS_OF_TILE = {
    TileType.ENEMY: "enemy",
    TileType.BOSS: "enemy",
    TileType.TREASURE: "treasure",
    TileType.FLOOR: "floor",
    TileType.DOOR: "floor",
    TileType.WALL: "wall",
}

# Largest possible Manhattan distance on the grid, used to normalize sparsity.
MAX_MANHATTAN = (GRID_WIDTH - 1) + (GRID_HEIGHT - 1)

LENIENCY_ENEMY_CAP = 10
LENIENCY_TREASURE_CAP = 10


class EncoderKind(str, Enum):
    TILES = "tiles"
    DIMENSIONS = "dimensions"
    INNER_CONTENT = "inner"
    COMBINED = "combined"

    @property
    def dim(self) -> int:
        return _ENCODER_DIMS[self]


_ENCODER_DIMS = {
    EncoderKind.TILES: GRID_CELLS * 3,
    EncoderKind.DIMENSIONS: 5,
    EncoderKind.INNER_CONTENT: 12,
    EncoderKind.COMBINED: 17,
}


@dataclass(frozen=True)
class DimensionValues:
    linearity: float
    leniency: float
    meso_patterns: int
    spatial_patterns: int
    symmetry: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.linearity, self.leniency, float(self.meso_patterns),
                         float(self.spatial_patterns), self.symmetry], dtype=np.float64)


@dataclass(frozen=True)
class ClassContent:
    count: int
    density: float
    sparsity: float


@dataclass(frozen=True)
class InnerContentValues:
    enemy: ClassContent
    treasure: ClassContent
    floor: ClassContent
    wall: ClassContent

    def as_vector(self) -> np.ndarray:
        out = []
        for cc in (self.enemy, self.treasure, self.floor, self.wall):
            out.extend([float(cc.count), cc.density, cc.sparsity])
        return np.array(out, dtype=np.float64)


def encode_tiles(grid: RoomGrid) -> np.ndarray:
    """91 tiles x 3 color channels in [0,1], row-major."""
    codes = np.fromiter((int(c) for c in grid.cells), dtype=np.intp, count=len(grid.cells))
    return _COLOR_LUT[codes].ravel()


def _mean_pairwise_manhattan(cells: list[int]) -> float:
    """Mean Manhattan distance over unordered pairs of cell indices."""
    n = len(cells)
    if n < 2:
        return 0.0
    # Manhattan separates into per-axis sums; count occurrences per coordinate.
    col_counts = [0] * GRID_WIDTH
    row_counts = [0] * GRID_HEIGHT
    for idx in cells:
        row_counts[idx // GRID_WIDTH] += 1
        col_counts[idx % GRID_WIDTH] += 1
    total = 0
    for counts in (col_counts, row_counts):
        for a in range(len(counts)):
            if not counts[a]:
                continue
            for b in range(a + 1, len(counts)):
                if counts[b]:
                    total += counts[a] * counts[b] * (b - a)
    return total / (n * (n - 1) / 2)


def encode_inner_content(grid: RoomGrid) -> InnerContentValues:
    """Count, density (count/91) and normalized sparsity per content class."""
    by_class: dict[str, list[int]] = {name: [] for name in CLASS_NAMES}
    for i, cell in enumerate(grid.cells):
        by_class[_CLASS_OF_TILE[TileType(cell)]].append(i)
    parts = {}
    for name in CLASS_NAMES:
        members = by_class[name]
        count = len(members)
        sparsity = _mean_pairwise_manhattan(members) / MAX_MANHATTAN
        parts[name] = ClassContent(count=count, density=count / GRID_CELLS, sparsity=sparsity)
    return InnerContentValues(**parts)


def _is_walkable(cell) -> bool:
    return TileType(cell) in WALKABLE


def _walkable_mask(grid: RoomGrid) -> list[bool]:
    return [_is_walkable(c) for c in grid.cells]


def _neighbors(idx: int) -> list[int]:
    r, c = divmod(idx, GRID_WIDTH)
    out = []
    if r > 0:
        out.append(idx - GRID_WIDTH)
    if r < GRID_HEIGHT - 1:
        out.append(idx + GRID_WIDTH)
    if c > 0:
        out.append(idx - 1)
    if c < GRID_WIDTH - 1:
        out.append(idx + 1)
    return out


# Mirror index per axis, or None when the cell has no in-bounds mirror.
# Diagonal axes reflect the central 7x7 subgrid (cols 3..9) only.
def _mirror_tables() -> list[list[int | None]]:
    vertical, horizontal, diag_main, diag_anti = [], [], [], []
    for idx in range(GRID_CELLS):
        r, c = divmod(idx, GRID_WIDTH)
        vertical.append(r * GRID_WIDTH + (GRID_WIDTH - 1 - c))
        horizontal.append((GRID_HEIGHT - 1 - r) * GRID_WIDTH + c)
        if 3 <= c <= 9:
            diag_main.append((c - 3) * GRID_WIDTH + (r + 3))
            diag_anti.append((9 - c) * GRID_WIDTH + (9 - r))
        else:
            diag_main.append(None)
            diag_anti.append(None)
    return [vertical, horizontal, diag_main, diag_anti]


_MIRRORS = _mirror_tables()
SYMMETRY_AXES = ("vertical", "horizontal", "diag_main", "diag_anti")


def symmetry(grid: RoomGrid) -> float:
    """Best reflective-match ratio of non-Floor cells over the four axes."""
    non_floor = [i for i, c in enumerate(grid.cells) if TileType(c) != TileType.FLOOR]
    if not non_floor:
        return 1.0
    best = 0.0
    for table in _MIRRORS:
        matched = 0
        for idx in non_floor:
            m = table[idx]
            if m is not None and grid.cells[m] == grid.cells[idx]:
                matched += 1
        best = max(best, matched / len(non_floor))
    return best


def linearity(grid: RoomGrid) -> float:
    """1 minus the fraction of walkable cells sitting in fully open 4-neighborhoods."""
    walk = _walkable_mask(grid)
    total = sum(walk)
    if total == 0:
        return 0.0
    open_cells = 0
    for idx in range(GRID_CELLS):
        if not walk[idx]:
            continue
        nbrs = _neighbors(idx)
        if len(nbrs) == 4 and all(walk[n] for n in nbrs):
            open_cells += 1
    return 1.0 - open_cells / total


def leniency(grid: RoomGrid) -> float:
    """Challenge-vs-reward balance from enemy, boss and treasure counts."""
    enemies = sum(1 for c in grid.cells if TileType(c) == TileType.ENEMY)
    bosses = sum(1 for c in grid.cells if TileType(c) == TileType.BOSS)
    treasures = sum(1 for c in grid.cells if TileType(c) == TileType.TREASURE)
    raw = 1.0 - (enemies + 2 * bosses) / LENIENCY_ENEMY_CAP \
        + treasures / (2 * LENIENCY_TREASURE_CAP)
    return min(1.0, max(0.0, raw))


@dataclass(frozen=True)
class DetectedPatterns:
    """Chambers and corridors as cell-index tuples, plus connector cells."""
    chambers: tuple
    corridors: tuple
    connectors: tuple


def detect_patterns(grid: RoomGrid) -> DetectedPatterns:
    walk = _walkable_mask(grid)
    covered = [False] * GRID_CELLS

    # Chambers: greedy row-major maximal all-walkable rectangles >= 3x3,
    # non-overlapping; area ties broken toward the wider rectangle.
    chambers: list[tuple] = []
    for idx in range(GRID_CELLS):
        if not walk[idx] or covered[idx]:
            continue
        r0, c0 = divmod(idx, GRID_WIDTH)
        best_area, best_h, best_w = 0, 0, 0
        max_w = GRID_WIDTH - c0
        for r in range(r0, GRID_HEIGHT):
            w = 0
            while w < max_w:
                j = r * GRID_WIDTH + c0 + w
                if not walk[j] or covered[j]:
                    break
                w += 1
            if w == 0:
                break
            max_w = min(max_w, w)
            h = r - r0 + 1
            area = h * max_w
            if area > best_area or (area == best_area and max_w > best_w):
                best_area, best_h, best_w = area, h, max_w
        if best_h >= 3 and best_w >= 3:
            cells = tuple(r * GRID_WIDTH + c
                          for r in range(r0, r0 + best_h)
                          for c in range(c0, c0 + best_w))
            for j in cells:
                covered[j] = True
            chambers.append(cells)

    # Corridors: maximal straight width-1 runs of walkable non-chamber cells,
    # length >= 3. Width 1 means no walkable neighbor perpendicular to the run.
    corridors: list[tuple] = []
    for r in range(GRID_HEIGHT):
        run: list[int] = []
        for c in range(GRID_WIDTH + 1):
            idx = r * GRID_WIDTH + c if c < GRID_WIDTH else None
            ok = False
            if idx is not None and walk[idx] and not covered[idx]:
                up = idx - GRID_WIDTH
                down = idx + GRID_WIDTH
                ok = (r == 0 or not walk[up]) and (r == GRID_HEIGHT - 1 or not walk[down])
            if ok:
                run.append(idx)
            else:
                if len(run) >= 3:
                    corridors.append(tuple(run))
                run = []
    for c in range(GRID_WIDTH):
        run = []
        for r in range(GRID_HEIGHT + 1):
            idx = r * GRID_WIDTH + c if r < GRID_HEIGHT else None
            ok = False
            if idx is not None and walk[idx] and not covered[idx]:
                ok = (c == 0 or not walk[idx - 1]) and (c == GRID_WIDTH - 1 or not walk[idx + 1])
            if ok:
                run.append(idx)
            else:
                if len(run) >= 3:
                    corridors.append(tuple(run))
                run = []

    # Connectors: walkable cells outside every pattern that join >= 2 of them.
    pattern_of: dict[int, int] = {}
    for pid, cells in enumerate(list(chambers) + list(corridors)):
        for j in cells:
            pattern_of[j] = pid
    connectors = []
    for idx in range(GRID_CELLS):
        if not walk[idx] or idx in pattern_of:
            continue
        adjacent = {pattern_of[n] for n in _neighbors(idx) if n in pattern_of}
        if len(adjacent) >= 2:
            connectors.append(idx)

    return DetectedPatterns(chambers=tuple(chambers), corridors=tuple(corridors),
                            connectors=tuple(connectors))


def count_spatial_patterns(grid: RoomGrid) -> int:
    det = detect_patterns(grid)
    return len(det.chambers) + len(det.corridors) + len(det.connectors)


def count_meso_patterns(grid: RoomGrid) -> int:
    det = detect_patterns(grid)
    cells = grid.cells
    count = 0
    for chamber in det.chambers:
        treasures = sum(1 for j in chamber if TileType(cells[j]) == TileType.TREASURE)
        enemies = sum(1 for j in chamber if TileType(cells[j]) in ENEMY_CLASS)
        if treasures >= 1 and enemies == 0:
            count += 1  # treasure room
        elif treasures >= 1 and enemies >= 1:
            count += 1  # guard room
    for corridor in det.corridors:
        for j in corridor:
            if any(TileType(cells[n]) in ENEMY_CLASS for n in _neighbors(j)):
                count += 1  # ambush spot
    walk = _walkable_mask(grid)
    for idx in range(GRID_CELLS):
        if walk[idx] and sum(1 for n in _neighbors(idx) if walk[n]) == 1:
            count += 1  # dead end
    return count


def encode_dimensions(grid: RoomGrid) -> DimensionValues:
    return DimensionValues(
        linearity=linearity(grid),
        leniency=leniency(grid),
        meso_patterns=count_meso_patterns(grid),
        spatial_patterns=count_spatial_patterns(grid),
        symmetry=symmetry(grid),
    )


def encode_combined(grid: RoomGrid) -> np.ndarray:
    return np.concatenate([encode_dimensions(grid).as_vector(),
                           encode_inner_content(grid).as_vector()])


def encode_grid(grid: RoomGrid, kind: EncoderKind) -> np.ndarray:
    if kind == EncoderKind.TILES:
        return encode_tiles(grid)
    if kind == EncoderKind.DIMENSIONS:
        return encode_dimensions(grid).as_vector()
    if kind == EncoderKind.INNER_CONTENT:
        return encode_inner_content(grid).as_vector()
    if kind == EncoderKind.COMBINED:
        return encode_combined(grid)
    raise ValueError(f"unknown encoder kind {kind!r}")


def encode_corpus(corpus: Corpus, kind: EncoderKind) -> tuple[np.ndarray, list]:
    """One row per edit step, in (session order, step order).

    Returns the matrix and a row index of (session_id, step_index) pairs.
    Identical grids are encoded once (sessions dwell on repeated snapshots).
    """
    if not corpus.sessions:
        raise ValueError("cannot encode an empty corpus")
    cache: dict[tuple, np.ndarray] = {}
    rows = []
    index = []
    for session in corpus.sessions:
        for step in session.steps:
            key = step.grid.cells
            vec = cache.get(key)
            if vec is None:
                vec = encode_grid(step.grid, kind)
                cache[key] = vec
            rows.append(vec)
            index.append((session.session_id, step.index))
    return np.vstack(rows), index


def standardize(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column z-scores (population std); zero-variance columns map to 0."""
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    return apply_standardize(X, mean, std), mean, std


def apply_standardize(X: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    safe = np.where(std == 0, 1.0, std)
    out = (X - mean) / safe
    return np.where(std == 0, 0.0, out)


def feature_column_names(kind: EncoderKind) -> list[str]:
    if kind == EncoderKind.TILES:
        return [f"t{i}_{ch}" for i in range(GRID_CELLS) for ch in ("r", "g", "b")]
    dim_names = ["linearity", "leniency", "meso_patterns", "spatial_patterns", "symmetry"]
    inner_names = [f"{cls}_{stat}" for cls in CLASS_NAMES
                   for stat in ("count", "density", "sparsity")]
    if kind == EncoderKind.DIMENSIONS:
        return dim_names
    if kind == EncoderKind.INNER_CONTENT:
        return inner_names
    if kind == EncoderKind.COMBINED:
        return dim_names + inner_names
    raise ValueError(f"unknown encoder kind {kind!r}")


def features_to_csv(X: np.ndarray, kind: EncoderKind) -> str:
    lines = [",".join(feature_column_names(kind))]
    for row in X:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
