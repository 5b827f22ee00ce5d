import numpy as np
import pytest

from scenedeck.annotate import (annotate_catalog, cast_recognizability,
                                load_annotations, save_annotations,
                                select_establishing_shot, setting_recognizability)
from scenedeck.catalog import CastAppearance, Frame
from scenedeck.embeddings import EmbeddingStore, HashTextProvider, cosine
from scenedeck.errors import MissingEmbedding
from scenedeck.synth import SynthSpec, synthesize


def _store_from(synth):
    return EmbeddingStore.from_vectors(synth.dim, synth.frame_vectors,
                                       synth.text_vectors,
                                       text_fallback=HashTextProvider())


def _frame(width=100, height=100):
    return Frame(frame_id="f", shot_id="t", ordinal=0, time_of_day="day",
                 width=width, height=height, image_path="images/f.png",
                 appearances=())


def _appearance(w, h, front):
    return CastAppearance(cast_id="c", body_bbox=(0, 0, w, h), face_bbox=None,
                          front_face=front)


def test_cast_recognizability_threshold():
    frame = _frame(100, 100)
    assert cast_recognizability(frame, _appearance(30, 50, front=True)) == 1   # 0.15
    assert cast_recognizability(frame, _appearance(100, 50, front=False)) == 0  # 0.50
    assert cast_recognizability(frame, _appearance(10, 100, front=True)) == 0  # exactly 0.10
    assert cast_recognizability(frame, _appearance(11, 100, front=True)) == 1  # just over


def test_cast_recognizability_ignores_other_fields():
    frame = _frame(100, 100)
    a = CastAppearance(cast_id="x", body_bbox=(5, 5, 40, 40),
                       face_bbox=(10, 10, 5, 5), front_face=True)
    b = CastAppearance(cast_id="y", body_bbox=(60, 1, 40, 40), face_bbox=None,
                       front_face=True)
    assert cast_recognizability(frame, a) == cast_recognizability(frame, b) == 1


def test_setting_recognizability_extremes():
    dim = 8
    tag_vec = np.eye(dim, dtype=np.float32)[0]
    day_vec = np.eye(dim, dtype=np.float32)[1]
    store = EmbeddingStore.from_vectors(
        dim, {"same": tag_vec, "ortho": np.eye(dim, dtype=np.float32)[2]},
        {"bedroom": tag_vec, "day": day_vec})
    loc, tod = setting_recognizability(store, "same", "bedroom", "day")
    assert loc == pytest.approx(1.0, abs=1e-6)
    loc, tod = setting_recognizability(store, "ortho", "bedroom", "day")
    assert loc == 0.0
    assert tod == 0.0


def test_select_establishing_shot_argmax_and_tie():
    from scenedeck.catalog import Scene

    scene = Scene(scene_id="s", movie_id="m", location_tag="bedroom",
                  shot_ids=("t0", "t1", "t2"), casts=())
    assert select_establishing_shot(scene, {"t0": 0.8, "t1": 1.2, "t2": 1.1}) == "t1"
    scene2 = Scene(scene_id="s", movie_id="m", location_tag="bedroom",
                   shot_ids=("t0", "t1"), casts=())
    assert select_establishing_shot(scene2, {"t0": 1.0, "t1": 1.0}) == "t0"


def test_own_tag_beats_other_tags():
    # pinned from a deterministic 20-seed sweep (1429/1440 = 99.24% at this
    # vocabulary size and dimension): noise keeps a frame closest to its
    # own scene's tag
    total = 0
    wins = 0
    for seed in range(20):
        synth = synthesize(SynthSpec(seed=seed, n_movies=3, scenes_per_movie=6,
                                     shots_per_scene=2, frames_per_shot=2,
                                     location_vocab_size=8, embedding_dim=256,
                                     write_images=False))
        store = _store_from(synth)
        anchors = {tag: synth.text_vectors[tag]
                   for tag in synth.catalog.location_vocabulary}
        for scene in synth.catalog.scenes.values():
            for frame in synth.catalog.frames_of_scene(scene.scene_id):
                emb = store.frame_embedding(frame.frame_id)
                own = max(0.0, cosine(anchors[scene.location_tag], emb))
                others = max(max(0.0, cosine(vec, emb))
                             for tag, vec in anchors.items()
                             if tag != scene.location_tag)
                total += 1
                wins += own > others
    assert wins / total >= 0.99


def test_planted_establishing_shot_recovered():
    # pinned from a seed sweep at the default noise level
    total = 0
    hits = 0
    for seed in range(6):
        synth = synthesize(SynthSpec(seed=seed, n_movies=2, scenes_per_movie=5,
                                     shots_per_scene=3, frames_per_shot=2,
                                     location_vocab_size=10, embedding_dim=256,
                                     write_images=False))
        annotations = annotate_catalog(synth.catalog, _store_from(synth))
        for scene_id, anno in annotations.items():
            total += 1
            hits += anno.establishing_shot_id == synth.planted_establishing[scene_id]
    assert hits / total >= 0.95


def test_establishing_matches_bruteforce(small_catalog, small_store,
                                         small_annotations):
    for scene in small_catalog.scenes.values():
        best = None
        best_sum = -1.0
        for shot_id in scene.shot_ids:
            keyframe = small_catalog.shots[shot_id].keyframe_id
            emb = small_store.frame_embedding(keyframe)
            loc = max(0.0, cosine(small_store.text_embedding(scene.location_tag), emb))
            tod_tag = small_catalog.frames[keyframe].time_of_day
            tod = max(0.0, cosine(small_store.text_embedding(tod_tag), emb))
            if loc + tod > best_sum:
                best_sum = loc + tod
                best = shot_id
        anno = small_annotations[scene.scene_id]
        assert anno.establishing_shot_id == best
        assert anno.establishing_frame_id == small_catalog.shots[best].keyframe_id
        assert anno.establishing_sum() == pytest.approx(best_sum, abs=1e-9)


def test_scores_in_range(small_annotations):
    for anno in small_annotations.values():
        for setting in anno.settings.values():
            assert 0.0 <= setting.p_loc_recog <= 1.0
            assert 0.0 <= setting.p_time_recog <= 1.0
        for cast_anno in anno.casts.values():
            assert all(e.c_recog in (0, 1) for e in cast_anno.entries)


def test_recognizable_frames_ordered_and_complete(small_catalog, small_annotations):
    for scene in small_catalog.scenes.values():
        anno = small_annotations[scene.scene_id]
        expected: dict[str, list[str]] = {c.cast_id: [] for c in scene.casts}
        for frame in small_catalog.frames_of_scene(scene.scene_id):
            for app in frame.appearances:
                if cast_recognizability(frame, app):
                    expected[app.cast_id].append(frame.frame_id)
        assert {k: list(v) for k, v in anno.recognizable_frames.items()} == expected
        for cast_id in expected:
            assert expected[cast_id], "synthetic planting guarantees coverage"


def test_cache_roundtrip(small_catalog, small_store, tmp_path):
    annotations = annotate_catalog(small_catalog, small_store)
    save_annotations(annotations, tmp_path)
    loaded = load_annotations(tmp_path)
    assert loaded == annotations

    save_annotations(loaded, tmp_path / "again")
    first = (tmp_path / "catalog/annotations.jsonl").read_bytes()
    second = (tmp_path / "again/catalog/annotations.jsonl").read_bytes()
    assert first == second


def test_annotation_deterministic(small_catalog, small_store):
    a = annotate_catalog(small_catalog, small_store)
    b = annotate_catalog(small_catalog, small_store)
    assert a == b


def test_missing_keyframe_embedding_is_reported(small_catalog, small_synth):
    victim = next(iter(small_catalog.shots.values())).keyframe_id
    vectors = {fid: vec for fid, vec in small_synth.frame_vectors.items()
               if fid != victim}
    store = EmbeddingStore.from_vectors(small_synth.dim, vectors,
                                        small_synth.text_vectors,
                                        text_fallback=HashTextProvider())
    with pytest.raises(MissingEmbedding) as err:
        annotate_catalog(small_catalog, store)
    assert victim in str(err.value)


def test_nonkeyframe_missing_embedding_falls_back_to_keyframe(small_catalog,
                                                              small_synth):
    shot = next(iter(small_catalog.shots.values()))
    victim = next(fid for fid in shot.frame_ids if fid != shot.keyframe_id)
    vectors = {fid: vec for fid, vec in small_synth.frame_vectors.items()
               if fid != victim}
    store = EmbeddingStore.from_vectors(small_synth.dim, vectors,
                                        small_synth.text_vectors,
                                        text_fallback=HashTextProvider())
    annotations = annotate_catalog(small_catalog, store)
    scene_id = shot.scene_id
    keyframe_anno = annotations[scene_id].settings[shot.keyframe_id]
    victim_anno = annotations[scene_id].settings[victim]
    assert victim_anno.p_loc_recog == keyframe_anno.p_loc_recog
