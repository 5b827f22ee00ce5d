import pytest

from scenedeck.annotate import annotate_catalog
from scenedeck.catalog import load_catalog
from scenedeck.embeddings import HashTextProvider, load_store
from scenedeck.retrieval import build_index
from scenedeck.synth import SynthSpec, generate_synthetic

SMALL_SPEC = SynthSpec(seed=11, n_movies=2, scenes_per_movie=3, shots_per_scene=3,
                       frames_per_shot=3, casts_per_scene=3,
                       location_vocab_size=12, embedding_dim=64)


@pytest.fixture(scope="session")
def small_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("small")
    generate_synthetic(SMALL_SPEC, path)
    return path


@pytest.fixture(scope="session")
def small_synth(small_dir):
    from scenedeck.synth import synthesize

    return synthesize(SMALL_SPEC)


@pytest.fixture(scope="session")
def small_catalog(small_dir):
    return load_catalog(small_dir)


@pytest.fixture(scope="session")
def small_store(small_dir):
    return load_store(small_dir, text_fallback=HashTextProvider())


@pytest.fixture(scope="session")
def small_annotations(small_catalog, small_store):
    return annotate_catalog(small_catalog, small_store)


@pytest.fixture(scope="session")
def small_index(small_catalog, small_annotations, small_store):
    return build_index(small_catalog, small_annotations, small_store)
