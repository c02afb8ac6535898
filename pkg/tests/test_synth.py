import numpy as np
import pytest

from persona_miner.rooms import validate_grid
from persona_miner.synth import (GeneratorConfig, JitterOp, PersonaSpec, StyleTemplate,
                                 default_personas, default_templates, generate_corpus,
                                 generate_corpus_labeled, generate_session,
                                 generate_session_labeled, synth_spec_from_json,
                                 synth_spec_to_json)
from persona_miner.trajectory import FilterConfig, Trajectory, unique_trajectories


def test_default_templates_are_twelve_valid_and_distinct(templates):
    assert [t.style_id for t in templates] == list(range(12))
    assert len({t.grid.cells for t in templates}) == 12
    for t in templates:
        assert validate_grid(t.grid) == []
        assert t.jitter_ops and all(op.weight > 0 for op in t.jitter_ops)


def test_default_personas_use_reference_paths(personas):
    assert [p.path for p in personas] == [(0, 8, 3, 7), (0, 8, 6), (0, 5, 6), (8, 3, 6)]
    for p in personas:
        assert set(p.branch_targets) <= set(range(12))


def test_single_phase_single_step_session(templates):
    spec = PersonaSpec(name="one", path=(0,), steps_per_phase=(1, 1),
                       branch_probability=0.0)
    config = GeneratorConfig(noise_rate=0.0, start_dwell=(1, 1), final_dwell_bonus=0)
    session = generate_session(spec, templates, seed=0, config=config)
    assert len(session.steps) == 1
    assert session.steps[0].grid == templates[0].grid


def test_generated_sessions_are_deterministic(personas, templates):
    a = generate_session(personas[0], templates, seed=123)
    b = generate_session(personas[0], templates, seed=123)
    assert a == b
    c = generate_session(personas[0], templates, seed=124)
    assert c != a


def test_every_generated_grid_is_valid(personas, templates):
    session, labels = generate_session_labeled(personas[1], templates, seed=9)
    assert len(labels) == len(session.steps)
    for step in session.steps:
        assert validate_grid(step.grid) == []


def test_unknown_style_id_rejected(templates):
    spec = PersonaSpec(name="bad", path=(0, 99))
    with pytest.raises(ValueError, match="unknown style id 99"):
        generate_session(spec, templates, seed=0)


def test_corpus_determinism(personas, templates):
    a = generate_corpus(personas, 12, seed=7, templates=templates)
    b = generate_corpus(personas, 12, seed=7, templates=templates)
    assert a == b


def test_corpus_scale_matches_reference(personas, templates):
    corpus = generate_corpus(personas, 180, seed=0, templates=templates)
    assert len(corpus.sessions) == 180
    assert abs(corpus.total_steps - 8196) / 8196 < 0.10


def test_mixture_sampling_is_replayable(templates):
    specs = [PersonaSpec(name="a", path=(0,)), PersonaSpec(name="b", path=(3,))]
    corpus, _labels, persona_of = generate_corpus_labeled(
        specs, 200, seed=42, weights=[0.5, 0.5], templates=templates)
    rng = np.random.default_rng(42)
    expected = rng.choice(2, size=200, p=[0.5, 0.5])
    got = [0 if persona_of[s.session_id] == "a" else 1 for s in corpus.sessions]
    assert got == expected.tolist()


def test_empty_specs_rejected():
    with pytest.raises(ValueError, match="persona"):
        generate_corpus([], 5, seed=0)


def test_zero_branch_corpus_yields_exactly_four_truth_paths(personas, templates):
    no_branch = [PersonaSpec(name=p.name, path=p.path, steps_per_phase=p.steps_per_phase,
                             branch_probability=0.0, branch_targets=p.branch_targets)
                 for p in personas]
    corpus, labels, _ = generate_corpus_labeled(no_branch, 60, seed=2,
                                                templates=templates)
    trajs = [Trajectory(s.session_id, labels[s.session_id]) for s in corpus.sessions]
    uniques = unique_trajectories(trajs, FilterConfig(theta=3))
    assert {u.path for u in uniques} == {(0, 8, 3, 7), (0, 8, 6), (0, 5, 6), (8, 3, 6)}


def test_branch_sessions_insert_branch_target(personas, templates):
    always = PersonaSpec(name="always-branch", path=(0, 8, 6), steps_per_phase=(4, 6),
                         branch_probability=1.0, branch_targets=(4,))
    _session, truth = generate_session_labeled(always, templates, seed=5)
    assert 4 in truth


def test_noise_rate_zero_keeps_phases_on_template(templates):
    spec = PersonaSpec(name="clean", path=(0,), steps_per_phase=(4, 4),
                       branch_probability=0.0)
    config = GeneratorConfig(noise_rate=0.0, start_dwell=(6, 6), final_dwell_bonus=0)
    session, _ = generate_session_labeled(spec, templates, seed=1, config=config)
    tpl = templates[0].grid
    # dwell alternates between the template and a one-cell jitter variant
    diffs = [sum(a != b for a, b in zip(step.grid.cells, tpl.cells))
             for step in session.steps]
    assert max(diffs) <= 1


def test_jitter_op_rejects_non_positive_weight():
    with pytest.raises(ValueError, match="weight"):
        JitterOp(kind="add_wall", weight=0.0, region=(1, 2))


def test_persona_spec_validation():
    with pytest.raises(ValueError, match="empty path"):
        PersonaSpec(name="x", path=())
    with pytest.raises(ValueError, match="branch probability"):
        PersonaSpec(name="x", path=(1,), branch_probability=1.5)


def test_spec_file_round_trip(personas, templates):
    doc = synth_spec_to_json(templates, personas, weights=[1, 1, 1, 1])
    back_templates, back_personas, weights = synth_spec_from_json(doc)
    assert back_templates == templates
    assert back_personas == personas
    assert weights == [1, 1, 1, 1]
