"""Domain types for rooms, editing sessions, and corpora, plus parsing and diffing.

A room is a fixed 13x7 grid of tiles. A design session is the ordered list of
room snapshots a designer produced, one snapshot per edit. The corpus file
format is JSON, documented in the README (top-level ``format_version: 1``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable

GRID_WIDTH = 13
GRID_HEIGHT = 7
GRID_CELLS = GRID_WIDTH * GRID_HEIGHT

CORPUS_FORMAT_VERSION = 1


class TileType(IntEnum):
    FLOOR = 0
    WALL = 1
    ENEMY = 2
    BOSS = 3
    TREASURE = 4
    DOOR = 5

    @property
    def char(self) -> str:
        return _TILE_CHARS[self.value]

    @classmethod
    def from_char(cls, ch: str) -> "TileType":
        try:
            return cls(_TILE_CHARS.index(ch))
        except ValueError:
            raise ValueError(f"unknown tile character {ch!r}") from None


_TILE_CHARS = "FWEBTD"


class CorpusParseError(ValueError):
    """Malformed corpus bytes; `offset` is the byte offset of the syntax error."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class CorpusValidationError(ValueError):
    """Structurally valid JSON that violates the corpus schema.

    Names the offending session (and step, when applicable).
    """

    def __init__(self, message: str, session_id: str | None = None,
                 step_index: int | None = None):
        super().__init__(message)
        self.session_id = session_id
        self.step_index = step_index


@dataclass(frozen=True)
class GridViolation:
    kind: str  # "dimension" or "tile_code"
    message: str
    cell_index: int | None = None


@dataclass(frozen=True)
class RoomGrid:
    """A room snapshot: `cells` is row-major, rows top to bottom.

    Construction is permissive so that malformed grids can be represented and
    reported by `validate_grid`; use `from_string` for strict parsing.
    """

    cells: tuple
    width: int = GRID_WIDTH
    height: int = GRID_HEIGHT

    @classmethod
    def all_floor(cls) -> "RoomGrid":
        return cls(cells=(TileType.FLOOR,) * GRID_CELLS)

    @classmethod
    def from_string(cls, text: str) -> "RoomGrid":
        if len(text) != GRID_CELLS:
            raise ValueError(f"grid string must have {GRID_CELLS} characters, got {len(text)}")
        return cls(cells=tuple(TileType.from_char(ch) for ch in text))

    def to_string(self) -> str:
        return "".join(TileType(c).char for c in self.cells)

    def tile_at(self, row: int, col: int) -> TileType:
        return self.cells[row * self.width + col]

    def with_tile(self, row: int, col: int, tile: TileType) -> "RoomGrid":
        idx = row * self.width + col
        cells = self.cells[:idx] + (tile,) + self.cells[idx + 1:]
        return RoomGrid(cells=cells, width=self.width, height=self.height)

    def with_cell(self, index: int, tile: TileType) -> "RoomGrid":
        cells = self.cells[:index] + (tile,) + self.cells[index + 1:]
        return RoomGrid(cells=cells, width=self.width, height=self.height)


def validate_grid(grid: RoomGrid) -> list[GridViolation]:
    """Check RoomGrid invariants; returns violations instead of raising."""
    violations: list[GridViolation] = []
    if grid.width != GRID_WIDTH or grid.height != GRID_HEIGHT:
        violations.append(GridViolation(
            "dimension", f"expected {GRID_WIDTH}x{GRID_HEIGHT}, got {grid.width}x{grid.height}"))
    if len(grid.cells) != grid.width * grid.height:
        violations.append(GridViolation(
            "dimension",
            f"expected {grid.width * grid.height} cells, got {len(grid.cells)}"))
    for i, cell in enumerate(grid.cells):
        try:
            TileType(cell)
        except ValueError:
            violations.append(GridViolation("tile_code", f"invalid tile code {cell!r}", i))
    return violations


@dataclass(frozen=True)
class EditStep:
    index: int
    grid: RoomGrid


@dataclass(frozen=True)
class DesignSession:
    session_id: str
    participant_tag: str
    steps: tuple

    def __post_init__(self):
        if not self.steps:
            raise ValueError(f"session {self.session_id!r} has no steps")
        for i, step in enumerate(self.steps):
            if step.index != i:
                raise ValueError(
                    f"session {self.session_id!r}: step indices must be contiguous "
                    f"from 0, found {step.index} at position {i}")


@dataclass(frozen=True)
class Corpus:
    sessions: tuple = field(default_factory=tuple)

    def __post_init__(self):
        seen = set()
        for s in self.sessions:
            if s.session_id in seen:
                raise ValueError(f"duplicate session_id {s.session_id!r}")
            seen.add(s.session_id)

    @property
    def total_steps(self) -> int:
        return sum(len(s.steps) for s in self.sessions)


def diff_steps(a: RoomGrid, b: RoomGrid) -> list[tuple[int, TileType, TileType]]:
    """Cell-wise difference: (cell index, tile in a, tile in b). Empty iff a == b."""
    return [(i, ta, tb) for i, (ta, tb) in enumerate(zip(a.cells, b.cells)) if ta != tb]


def apply_diff(grid: RoomGrid, diff: Iterable[tuple[int, TileType, TileType]]) -> RoomGrid:
    cells = list(grid.cells)
    for idx, _old, new in diff:
        cells[idx] = new
    return RoomGrid(cells=tuple(cells), width=grid.width, height=grid.height)


def parse_corpus(data: bytes | str) -> Corpus:
    """Parse and validate the JSON corpus format.

    Raises CorpusParseError (with byte offset) on malformed JSON and
    CorpusValidationError (naming session/step) on schema or grid violations.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise CorpusParseError(f"malformed corpus JSON at offset {e.pos}: {e.msg}",
                               offset=e.pos) from e

    if not isinstance(doc, dict):
        raise CorpusValidationError("corpus root must be a JSON object")
    version = doc.get("format_version")
    if version != CORPUS_FORMAT_VERSION:
        raise CorpusValidationError(
            f"unsupported format_version {version!r}, expected {CORPUS_FORMAT_VERSION}")
    raw_sessions = doc.get("sessions")
    if not isinstance(raw_sessions, list):
        raise CorpusValidationError('corpus must have a "sessions" list')

    sessions = []
    for si, raw in enumerate(raw_sessions):
        sid = raw.get("session_id") if isinstance(raw, dict) else None
        if not isinstance(sid, str):
            raise CorpusValidationError(f"session at position {si} lacks a string session_id")
        tag = raw.get("participant_tag", "")
        if not isinstance(tag, str):
            raise CorpusValidationError(f"session {sid!r}: participant_tag must be a string",
                                        session_id=sid)
        raw_steps = raw.get("steps")
        if not isinstance(raw_steps, list) or not raw_steps:
            raise CorpusValidationError(f"session {sid!r}: steps must be a non-empty list",
                                        session_id=sid)
        steps = []
        for pi, raw_step in enumerate(raw_steps):
            if not isinstance(raw_step, dict):
                raise CorpusValidationError(
                    f"session {sid!r} step {pi}: must be an object",
                    session_id=sid, step_index=pi)
            index = raw_step.get("index")
            grid_str = raw_step.get("grid")
            if not isinstance(index, int) or not isinstance(grid_str, str):
                raise CorpusValidationError(
                    f"session {sid!r} step {pi}: needs integer index and string grid",
                    session_id=sid, step_index=pi)
            if len(grid_str) != GRID_CELLS:
                raise CorpusValidationError(
                    f"session {sid!r} step {pi}: grid must have {GRID_CELLS} cells, "
                    f"got {len(grid_str)}",
                    session_id=sid, step_index=pi)
            try:
                grid = RoomGrid.from_string(grid_str)
            except ValueError as e:
                raise CorpusValidationError(
                    f"session {sid!r} step {pi}: {e}", session_id=sid, step_index=pi) from e
            steps.append(EditStep(index=index, grid=grid))
        try:
            sessions.append(DesignSession(session_id=sid, participant_tag=tag,
                                          steps=tuple(steps)))
        except ValueError as e:
            raise CorpusValidationError(str(e), session_id=sid) from e
    try:
        return Corpus(sessions=tuple(sessions))
    except ValueError as e:
        raise CorpusValidationError(str(e)) from e


def serialize_corpus(corpus: Corpus) -> bytes:
    """Inverse of parse_corpus; byte output is deterministic."""
    doc = {
        "format_version": CORPUS_FORMAT_VERSION,
        "sessions": [
            {
                "session_id": s.session_id,
                "participant_tag": s.participant_tag,
                "steps": [{"index": st.index, "grid": st.grid.to_string()} for st in s.steps],
            }
            for s in corpus.sessions
        ],
    }
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")
