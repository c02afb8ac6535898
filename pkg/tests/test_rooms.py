import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from persona_miner.rooms import (GRID_CELLS, Corpus, CorpusParseError,
                                 CorpusValidationError, DesignSession, EditStep,
                                 RoomGrid, TileType, apply_diff, diff_steps,
                                 parse_corpus, serialize_corpus, validate_grid)

grids = st.lists(st.sampled_from(list(TileType)), min_size=GRID_CELLS,
                 max_size=GRID_CELLS).map(lambda cells: RoomGrid(cells=tuple(cells)))


def make_session(sid, *grids_):
    return DesignSession(session_id=sid, participant_tag="t",
                         steps=tuple(EditStep(index=i, grid=g) for i, g in enumerate(grids_)))


def test_tile_codes_and_chars_are_stable():
    assert [t.value for t in TileType] == [0, 1, 2, 3, 4, 5]
    assert "".join(t.char for t in TileType) == "FWEBTD"
    for t in TileType:
        assert TileType.from_char(t.char) is t
    with pytest.raises(ValueError):
        TileType.from_char("X")


@given(grids)
def test_grid_string_round_trip(grid):
    assert RoomGrid.from_string(grid.to_string()) == grid


def test_grid_from_string_rejects_wrong_length():
    with pytest.raises(ValueError, match="91"):
        RoomGrid.from_string("F" * 90)


def test_validate_grid_accepts_all_floor():
    assert validate_grid(RoomGrid.all_floor()) == []


def test_validate_grid_flags_transposed_dimensions():
    grid = RoomGrid(cells=(TileType.FLOOR,) * 91, width=7, height=13)
    kinds = {v.kind for v in validate_grid(grid)}
    assert kinds == {"dimension"}


def test_validate_grid_flags_missing_cell():
    grid = RoomGrid(cells=(TileType.FLOOR,) * 90)
    violations = validate_grid(grid)
    assert any(v.kind == "dimension" and "91" in v.message for v in violations)


def test_validate_grid_flags_bad_tile_code():
    cells = (TileType.FLOOR,) * 90 + (9,)
    violations = validate_grid(RoomGrid(cells=cells))
    assert [(v.kind, v.cell_index) for v in violations] == [("tile_code", 90)]


def test_diff_identity():
    g = RoomGrid.all_floor()
    assert diff_steps(g, g) == []


def test_diff_single_cell():
    a = RoomGrid.all_floor()
    b = a.with_cell(0, TileType.WALL)
    assert diff_steps(a, b) == [(0, TileType.FLOOR, TileType.WALL)]


@settings(max_examples=50)
@given(grids, grids)
def test_apply_diff_reconstructs_target(a, b):
    assert apply_diff(a, diff_steps(a, b)) == b


def test_parse_minimal_corpus():
    doc = {"format_version": 1, "sessions": [
        {"session_id": "a", "participant_tag": "p",
         "steps": [{"index": 0, "grid": "F" * 91}]}]}
    corpus = parse_corpus(json.dumps(doc))
    assert len(corpus.sessions) == 1
    assert len(corpus.sessions[0].steps) == 1
    assert corpus.sessions[0].steps[0].grid == RoomGrid.all_floor()


def test_parse_reports_byte_offset_on_bad_json():
    with pytest.raises(CorpusParseError) as exc:
        parse_corpus(b'{"format_version": 1, "sessions": [}')
    assert exc.value.offset == 35


def test_parse_rejects_short_grid_naming_session_and_step():
    doc = {"format_version": 1, "sessions": [
        {"session_id": "sess-7", "participant_tag": "",
         "steps": [{"index": 0, "grid": "F" * 90}]}]}
    with pytest.raises(CorpusValidationError) as exc:
        parse_corpus(json.dumps(doc))
    assert exc.value.session_id == "sess-7"
    assert exc.value.step_index == 0
    assert "91" in str(exc.value)


def test_parse_rejects_bad_tile_character():
    doc = {"format_version": 1, "sessions": [
        {"session_id": "s", "participant_tag": "",
         "steps": [{"index": 0, "grid": "Z" + "F" * 90}]}]}
    with pytest.raises(CorpusValidationError, match="'Z'"):
        parse_corpus(json.dumps(doc))


def test_parse_rejects_unknown_format_version():
    with pytest.raises(CorpusValidationError, match="format_version"):
        parse_corpus(json.dumps({"format_version": 2, "sessions": []}))


def test_parse_rejects_non_contiguous_step_indices():
    doc = {"format_version": 1, "sessions": [
        {"session_id": "s", "participant_tag": "",
         "steps": [{"index": 0, "grid": "F" * 91}, {"index": 2, "grid": "F" * 91}]}]}
    with pytest.raises(CorpusValidationError, match="contiguous"):
        parse_corpus(json.dumps(doc))


def test_duplicate_session_ids_rejected():
    g = RoomGrid.all_floor()
    with pytest.raises(ValueError, match="duplicate"):
        Corpus(sessions=(make_session("a", g), make_session("a", g)))


def test_empty_session_rejected():
    with pytest.raises(ValueError, match="no steps"):
        DesignSession(session_id="s", participant_tag="", steps=())


@settings(max_examples=25, deadline=None)
@given(st.lists(grids, min_size=1, max_size=4), st.lists(grids, min_size=1, max_size=4))
def test_serialize_parse_round_trip(ga, gb):
    corpus = Corpus(sessions=(make_session("a", *ga), make_session("b", *gb)))
    assert parse_corpus(serialize_corpus(corpus)) == corpus


def test_round_trip_at_reference_scale(personas, templates):
    # 180 sessions at the reference scale (~8196 steps) survive a byte round trip
    from persona_miner.synth import generate_corpus
    corpus = generate_corpus(personas, 180, seed=3, templates=templates)
    assert abs(corpus.total_steps - 8196) / 8196 < 0.10
    assert parse_corpus(serialize_corpus(corpus)) == corpus
