"""Synthetic design-session generator with known ground truth.

Ships 12 hand-authored style templates and 4 default persona paths. The
templates are built from two nested edit chains (wall structure and
enemy/treasure content), so the corpus carries two dominant directions of
variance and the styles stay separable after 2-D reduction. Jitter during
dwell phases only touches cells outside both chains, keeping style blobs
tight in the reduced space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rooms import GRID_CELLS, GRID_WIDTH, Corpus, DesignSession, EditStep, RoomGrid, TileType


def _cell(row: int, col: int) -> int:
    return row * GRID_WIDTH + col

# The styles live on two nested edit chains: wall structure and
# enemy/treasure content. Corpus-level 2-D reduction keeps exactly these two
# heavily-trafficked directions, so a style's reduced-space position is
# (walls placed, content placed). The six styles on the archetype paths sit
# on distinct integer lattice points; the other six sit at mid-edge
# positions plus private flavor cells (invisible after reduction but keeping
# every template distinct in full tile space). Transitions between path
# neighbors are 2-4 single-cell edits, so border steps between styles stay
# under the run-length filter threshold.
_WALL_CHAIN = [
    (1, 6), (5, 6),      # central dividers
    (3, 4), (3, 8),      # horizontal arms (completes a cross shape)
]

_CONTENT_CHAIN = [
    (TileType.ENEMY, 2, 3), (TileType.TREASURE, 4, 9),
]

_DOOR_CELL = (3, 0)

W, E, T, B = TileType.WALL, TileType.ENEMY, TileType.TREASURE, TileType.BOSS

# style id -> (name, wall chain cells, content chain cells, extra tiles)
_STYLE_DEFS = {
    0: ("empty-initial", 0, 0, []),
    1: ("complex-wall-mazes", 3, 0,
        [(W, 1, 2), (W, 5, 10), (W, 0, 4), (W, 6, 8)]),
    2: ("dense-less-organized", 3, 2, [(E, 3, 10), (T, 1, 10)]),
    3: ("structural-complexification", 4, 0, []),
    4: ("dense-full-leniency", 2, 1, [(T, 3, 2)]),
    5: ("separating-populating-chambers", 0, 2, []),
    6: ("balancing-optimizing", 2, 2, []),
    7: ("bordered-deep-structure", 4, 2, []),
    8: ("main-structural-shapes", 2, 0, []),
    9: ("dense-disorganized-micro", 1, 2, [(E, 3, 11), (T, 3, 1)]),
    10: ("high-challenge-clear-goal", 4, 1, [(B, 3, 6)]),
    11: ("chamber-separation-forced-encounter", 0, 1, [(W, 3, 6)]),
}


@dataclass(frozen=True)
class JitterOp:
    kind: str          # "add_wall" | "add_enemy" | "add_treasure" | "add_boss"
    weight: float
    region: tuple      # cell indices where the op may place a tile

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError(f"jitter op weight must be positive, got {self.weight}")


_OP_TILES = {
    "add_wall": TileType.WALL,
    "add_enemy": TileType.ENEMY,
    "add_treasure": TileType.TREASURE,
    "add_boss": TileType.BOSS,
}


@dataclass(frozen=True)
class StyleTemplate:
    style_id: int
    name: str
    grid: RoomGrid
    jitter_ops: tuple


@dataclass(frozen=True)
class PersonaSpec:
    name: str
    path: tuple
    steps_per_phase: tuple = (6, 9)
    branch_probability: float = 0.1
    branch_targets: tuple = ()

    def __post_init__(self):
        if not self.path:
            raise ValueError(f"persona {self.name!r} has an empty path")
        if not 0.0 <= self.branch_probability <= 1.0:
            raise ValueError(f"branch probability must be in [0,1], "
                             f"got {self.branch_probability}")


@dataclass(frozen=True)
class GeneratorConfig:
    noise_rate: float = 0.1
    start_dwell: tuple = (12, 16)       # steps spent at the first style
    final_dwell_bonus: int = 6          # extra polish steps at the last style
    branch_dwell: tuple = (10, 14)      # steps spent at a branch detour style


def default_templates() -> list[StyleTemplate]:
    reserved = {_cell(r, c) for r, c in _WALL_CHAIN}
    reserved |= {_cell(r, c) for _t, r, c in _CONTENT_CHAIN}
    reserved.add(_cell(*_DOOR_CELL))
    for _name, _w, _c, extras in _STYLE_DEFS.values():
        reserved |= {_cell(r, c) for _t, r, c in extras}
    free = tuple(i for i in range(GRID_CELLS) if i not in reserved)

    templates = []
    for style_id, (name, n_walls, n_content, extras) in sorted(_STYLE_DEFS.items()):
        cells = list(RoomGrid.all_floor().cells)
        cells[_cell(*_DOOR_CELL)] = TileType.DOOR
        for r, col in _WALL_CHAIN[:n_walls]:
            cells[_cell(r, col)] = TileType.WALL
        for tile, r, col in _CONTENT_CHAIN[:n_content]:
            cells[_cell(r, col)] = tile
        for tile, r, col in extras:
            cells[_cell(r, col)] = tile
        ops = tuple(JitterOp(kind=k, weight=1.0, region=free)
                    for k in ("add_wall", "add_enemy", "add_treasure"))
        templates.append(StyleTemplate(style_id=style_id, name=name,
                                       grid=RoomGrid(cells=tuple(cells)), jitter_ops=ops))
    return templates


def default_personas() -> list[PersonaSpec]:
    return [
        PersonaSpec(name="structural-focus", path=(0, 8, 3, 7), branch_targets=(1, 10)),
        PersonaSpec(name="goal-oriented", path=(0, 8, 6), branch_targets=(10, 4)),
        PersonaSpec(name="split-central-focus", path=(0, 5, 6), branch_targets=(11, 2)),
        PersonaSpec(name="complex-balance", path=(8, 3, 6), branch_targets=(9, 2)),
    ]


_NOISE_TILES = (TileType.FLOOR, TileType.WALL, TileType.ENEMY, TileType.TREASURE)


class _SessionBuilder:
    def __init__(self, templates: dict, rng: np.random.Generator, config: GeneratorConfig):
        self.templates = templates
        self.rng = rng
        self.config = config
        self.grids: list[RoomGrid] = []
        self.labels: list[int] = []
        self.current: RoomGrid | None = None

    def emit(self, label: int) -> None:
        self.grids.append(self.current)
        self.labels.append(label)

    def _sample(self, rng_range) -> int:
        lo, hi = rng_range
        return int(self.rng.integers(lo, hi + 1))

    def _noise_edit(self) -> bool:
        if self.rng.random() >= self.config.noise_rate:
            return False
        cell = int(self.rng.integers(0, len(self.current.cells)))
        tile = _NOISE_TILES[int(self.rng.integers(0, len(_NOISE_TILES)))]
        self.current = self.current.with_cell(cell, tile)
        return True

    def _fix_one_diff(self, target: RoomGrid) -> None:
        diffs = [i for i, (a, b) in enumerate(zip(self.current.cells, target.cells)) if a != b]
        cell = diffs[int(self.rng.integers(0, len(diffs)))]
        self.current = self.current.with_cell(cell, target.cells[cell])

    def morph_to(self, tpl: StyleTemplate, label: int) -> None:
        guard = 0
        while self.current.cells != tpl.grid.cells:
            if not self._noise_edit():
                self._fix_one_diff(tpl.grid)
            self.emit(label)
            guard += 1
            if guard > 2000:
                raise RuntimeError("morph did not converge; noise rate too high?")

    def dwell(self, tpl: StyleTemplate, label: int, steps: int) -> None:
        for _ in range(steps):
            if self._noise_edit():
                self.emit(label)
                continue
            if self.current.cells != tpl.grid.cells:
                self._fix_one_diff(tpl.grid)
            else:
                self._jitter(tpl)
            self.emit(label)

    def _jitter(self, tpl: StyleTemplate) -> None:
        weights = np.array([op.weight for op in tpl.jitter_ops])
        op = tpl.jitter_ops[int(self.rng.choice(len(tpl.jitter_ops), p=weights / weights.sum()))]
        cells = [c for c in op.region if self.current.cells[c] == tpl.grid.cells[c]]
        if not cells:
            return  # region saturated; emit the unchanged grid
        cell = cells[int(self.rng.integers(0, len(cells)))]
        self.current = self.current.with_cell(cell, _OP_TILES[op.kind])


def generate_session_labeled(spec: PersonaSpec, templates, seed: int,
                             config: GeneratorConfig = GeneratorConfig(),
                             session_id: str | None = None,
                             participant_tag: str | None = None):
    """Deterministic session walking the persona's style path.

    Returns (DesignSession, per-step intended style ids).
    """
    by_id = {t.style_id: t for t in templates}
    for style in list(spec.path) + list(spec.branch_targets):
        if style not in by_id:
            raise ValueError(f"unknown style id {style} in persona {spec.name!r}")

    rng = np.random.default_rng(seed)
    b = _SessionBuilder(by_id, rng, config)
    b.current = by_id[spec.path[0]].grid

    do_branch = bool(spec.branch_targets) and rng.random() < spec.branch_probability
    branch_phase = int(rng.integers(0, len(spec.path))) if do_branch else -1
    branch_target = (int(spec.branch_targets[int(rng.integers(0, len(spec.branch_targets)))])
                     if do_branch else -1)

    for phase_i, style in enumerate(spec.path):
        tpl = by_id[style]
        if phase_i == 0:
            b.emit(style)  # the initial snapshot counts as the first dwell step
            dwell = b._sample(config.start_dwell) - 1
        else:
            b.morph_to(tpl, style)
            dwell = b._sample(spec.steps_per_phase)
        if phase_i == len(spec.path) - 1:
            dwell += config.final_dwell_bonus
        b.dwell(tpl, style, max(0, dwell))
        if phase_i == branch_phase:
            btpl = by_id[branch_target]
            b.morph_to(btpl, branch_target)
            b.dwell(btpl, branch_target, b._sample(config.branch_dwell))

    sid = session_id if session_id is not None else f"session-{seed}"
    tag = participant_tag if participant_tag is not None else spec.name
    steps = tuple(EditStep(index=i, grid=g) for i, g in enumerate(b.grids))
    return DesignSession(session_id=sid, participant_tag=tag, steps=steps), tuple(b.labels)


def generate_session(spec: PersonaSpec, templates, seed: int,
                     config: GeneratorConfig = GeneratorConfig()) -> DesignSession:
    session, _labels = generate_session_labeled(spec, templates, seed, config)
    return session


def generate_corpus_labeled(personas, n_sessions: int, seed: int,
                            weights=None, templates=None,
                            config: GeneratorConfig = GeneratorConfig()):
    """Sample persona specs by weight and generate n_sessions sessions.

    Returns (corpus, per-session style labels, per-session persona names).
    Defaults reproduce the reference scale: 180 sessions come out near 8196
    total steps.
    """
    personas = list(personas)
    if not personas:
        raise ValueError("no persona specs given")
    if templates is None:
        templates = default_templates()
    if weights is None:
        weights = [1.0 / len(personas)] * len(personas)
    if len(weights) != len(personas):
        raise ValueError("weights must match persona specs one-to-one")
    weights = np.asarray(weights, dtype=np.float64)
    weights = weights / weights.sum()

    rng = np.random.default_rng(seed)
    assignment = rng.choice(len(personas), size=n_sessions, p=weights)
    session_seeds = rng.integers(0, 2 ** 63 - 1, size=n_sessions)

    sessions = []
    labels = {}
    persona_of = {}
    for i in range(n_sessions):
        spec = personas[int(assignment[i])]
        sid = f"s{i:04d}"
        session, lab = generate_session_labeled(
            spec, templates, int(session_seeds[i]), config,
            session_id=sid, participant_tag=spec.name)
        sessions.append(session)
        labels[sid] = lab
        persona_of[sid] = spec.name
    return Corpus(sessions=tuple(sessions)), labels, persona_of


def generate_corpus(personas, n_sessions: int, seed: int, weights=None,
                    templates=None, config: GeneratorConfig = GeneratorConfig()) -> Corpus:
    corpus, _labels, _personas = generate_corpus_labeled(
        personas, n_sessions, seed, weights=weights, templates=templates, config=config)
    return corpus


def synth_spec_to_json(templates, personas, weights=None) -> dict:
    return {
        "templates": [
            {"style_id": t.style_id, "name": t.name, "grid": t.grid.to_string(),
             "jitter_ops": [{"kind": op.kind, "weight": op.weight,
                             "region": list(op.region)} for op in t.jitter_ops]}
            for t in templates
        ],
        "personas": [
            {"name": p.name, "path": list(p.path),
             "steps_per_phase": list(p.steps_per_phase),
             "branch_probability": p.branch_probability,
             "branch_targets": list(p.branch_targets)}
            for p in personas
        ],
        "weights": list(weights) if weights is not None else None,
    }


def synth_spec_from_json(doc: dict):
    templates = [
        StyleTemplate(
            style_id=int(t["style_id"]), name=t["name"],
            grid=RoomGrid.from_string(t["grid"]),
            jitter_ops=tuple(JitterOp(kind=op["kind"], weight=float(op["weight"]),
                                      region=tuple(op["region"]))
                             for op in t.get("jitter_ops", [])))
        for t in doc["templates"]
    ]
    personas = [
        PersonaSpec(name=p["name"], path=tuple(p["path"]),
                    steps_per_phase=tuple(p.get("steps_per_phase", (3, 6))),
                    branch_probability=float(p.get("branch_probability", 0.1)),
                    branch_targets=tuple(p.get("branch_targets", ())))
        for p in doc["personas"]
    ]
    return templates, personas, doc.get("weights")
