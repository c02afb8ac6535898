import pytest

from persona_miner import synth


@pytest.fixture(scope="session")
def templates():
    return synth.default_templates()


@pytest.fixture(scope="session")
def personas():
    return synth.default_personas()


@pytest.fixture(scope="session")
def small_corpus(personas, templates):
    """30-session synthetic corpus shared by the heavier integration tests."""
    corpus, labels, persona_of = synth.generate_corpus_labeled(
        personas, 30, seed=11, templates=templates)
    return corpus, labels, persona_of


@pytest.fixture(scope="session")
def pipeline_dir(tmp_path_factory, small_corpus):
    """One full pipeline run on the shared corpus, reused across tests."""
    from persona_miner.pipeline import PipelineConfig, run_pipeline

    corpus, _labels, _personas = small_corpus
    out = tmp_path_factory.mktemp("pipeline")
    manifest = run_pipeline(corpus, PipelineConfig(), out)
    return out, manifest, corpus
