"""Catalog preprocessing: recognizability scores and establishing shots.

For every frame we score how recognizable the scene's location tag and
the frame's time-of-day are, as the clamped cosine between the tag text
embedding and the frame embedding (prompts for time-of-day are the bare
words "day" and "night").  Frames without their own embedding reuse
their shot keyframe's.  A scene's establishing shot is the shot whose
keyframe maximizes the sum of the two scores, earliest shot winning
ties.

Cast recognizability is binary: 1 iff the appearance has a visible front
face and its body bbox covers strictly more than 10% of the frame area.

The whole result is cacheable as ``catalog/annotations.jsonl`` (one
scene per line, canonical key order) and is bit-reproducible for a fixed
catalog and store.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .catalog import CastAppearance, Catalog, Frame, Scene
from .embeddings import EmbeddingStore, cosine
from .errors import MissingEmbedding

ANNOTATIONS_FILE = "catalog/annotations.jsonl"


@dataclass(frozen=True)
class FrameSettingAnnotation:
    frame_id: str
    p_loc: str
    p_loc_recog: float
    p_time: str
    p_time_recog: float


@dataclass(frozen=True)
class CastRecogEntry:
    cast_id: str
    c_recog: int
    gender: str
    age: int


@dataclass(frozen=True)
class FrameCastAnnotation:
    frame_id: str
    entries: tuple[CastRecogEntry, ...]


@dataclass
class SceneAnnotation:
    scene_id: str
    establishing_shot_id: str
    establishing_frame_id: str
    settings: dict[str, FrameSettingAnnotation]
    casts: dict[str, FrameCastAnnotation]
    recognizable_frames: dict[str, tuple[str, ...]]

    def establishing_sum(self) -> float:
        anno = self.settings[self.establishing_frame_id]
        return anno.p_loc_recog + anno.p_time_recog


def clamp_score(value: float) -> float:
    """Map a cosine in [-1, 1] to the score range [0, 1]."""
    return max(0.0, value)


def cast_recognizability(frame: Frame, appearance: CastAppearance) -> int:
    """1 iff the cast member is easy to recognize in the frame.

    Integer arithmetic keeps the 10% area threshold exact: a bbox of
    exactly one tenth of the frame does not qualify.
    """
    if not appearance.front_face:
        return 0
    _, _, w, h = appearance.body_bbox
    return 1 if 10 * w * h > frame.width * frame.height else 0


def setting_recognizability(store: EmbeddingStore, frame_id: str,
                            p_loc: str, p_time: str) -> tuple[float, float]:
    """Location and time-of-day recognizability for one embedded frame."""
    emb = store.frame_embedding(frame_id)
    loc_score = clamp_score(cosine(store.text_embedding(p_loc), emb))
    time_score = clamp_score(cosine(store.text_embedding(p_time), emb))
    return loc_score, time_score


def select_establishing_shot(scene: Scene,
                             keyframe_sums: dict[str, float]) -> str:
    """Shot whose keyframe has the highest summed recognizability.

    ``keyframe_sums`` maps each shot id to the sum of its keyframe's
    location and time-of-day scores; ties go to the earliest shot.
    """
    best_id = None
    best = -1.0
    for shot_id in scene.shot_ids:
        value = keyframe_sums[shot_id]
        if value > best:
            best = value
            best_id = shot_id
    return best_id


def _effective_embedding_ids(catalog: Catalog, store: EmbeddingStore) -> dict[str, str]:
    """Frame id -> id whose embedding stands in for it (own or keyframe)."""
    mapping: dict[str, str] = {}
    missing: list[str] = []
    for shot in catalog.shots.values():
        key_ok = store.has_frame(shot.keyframe_id)
        for frame_id in shot.frame_ids:
            if store.has_frame(frame_id):
                mapping[frame_id] = frame_id
            elif key_ok:
                mapping[frame_id] = shot.keyframe_id
            else:
                missing.append(frame_id)
    if missing:
        missing.sort()
        raise MissingEmbedding(", ".join(missing[:20])
                               + (" ..." if len(missing) > 20 else ""))
    return mapping


def annotate_catalog(catalog: Catalog, store: EmbeddingStore) -> dict[str, SceneAnnotation]:
    """Annotate every scene; deterministic for a fixed catalog + store.

    Scores are computed in float64 via grouped matrix products, which
    matches per-frame :func:`cosine` up to BLAS summation order.
    """
    mapping = _effective_embedding_ids(catalog, store)
    frame_ids = list(catalog.frames.keys())
    index_of = {fid: i for i, fid in enumerate(frame_ids)}
    matrix = store.frame_matrix([mapping[fid] for fid in frame_ids]).astype(np.float64)

    loc_scores = np.zeros(len(frame_ids))
    by_tag: dict[str, list[int]] = {}
    for scene in catalog.scenes.values():
        rows = [index_of[fr.frame_id] for fr in catalog.frames_of_scene(scene.scene_id)]
        by_tag.setdefault(scene.location_tag, []).extend(rows)
    for tag, rows in by_tag.items():
        anchor = store.text_embedding(tag).astype(np.float64)
        loc_scores[rows] = matrix[rows] @ anchor

    time_scores = np.zeros(len(frame_ids))
    for tod in ("day", "night"):
        rows = [index_of[fid] for fid in frame_ids
                if catalog.frames[fid].time_of_day == tod]
        if rows:
            anchor = store.text_embedding(tod).astype(np.float64)
            time_scores[rows] = matrix[rows] @ anchor
    loc_scores = np.clip(loc_scores, 0.0, 1.0)
    time_scores = np.clip(time_scores, 0.0, 1.0)

    annotations: dict[str, SceneAnnotation] = {}
    for scene in catalog.scenes.values():
        settings: dict[str, FrameSettingAnnotation] = {}
        cast_annos: dict[str, FrameCastAnnotation] = {}
        recog_lists: dict[str, list[str]] = {c.cast_id: [] for c in scene.casts}
        cast_by_id = {c.cast_id: c for c in scene.casts}

        for frame in catalog.frames_of_scene(scene.scene_id):
            row = index_of[frame.frame_id]
            settings[frame.frame_id] = FrameSettingAnnotation(
                frame_id=frame.frame_id, p_loc=scene.location_tag,
                p_loc_recog=float(loc_scores[row]), p_time=frame.time_of_day,
                p_time_recog=float(time_scores[row]))
            entries = []
            for app in frame.appearances:
                cast = cast_by_id[app.cast_id]
                flag = cast_recognizability(frame, app)
                entries.append(CastRecogEntry(cast_id=app.cast_id, c_recog=flag,
                                              gender=cast.gender, age=cast.age))
                if flag:
                    recog_lists[app.cast_id].append(frame.frame_id)
            cast_annos[frame.frame_id] = FrameCastAnnotation(
                frame_id=frame.frame_id, entries=tuple(entries))

        sums = {}
        for shot_id in scene.shot_ids:
            keyframe = catalog.shots[shot_id].keyframe_id
            anno = settings[keyframe]
            sums[shot_id] = anno.p_loc_recog + anno.p_time_recog
        establishing = select_establishing_shot(scene, sums)

        annotations[scene.scene_id] = SceneAnnotation(
            scene_id=scene.scene_id,
            establishing_shot_id=establishing,
            establishing_frame_id=catalog.shots[establishing].keyframe_id,
            settings=settings,
            casts=cast_annos,
            recognizable_frames={cid: tuple(fids)
                                 for cid, fids in recog_lists.items()},
        )
    return annotations


def save_annotations(annotations: dict[str, SceneAnnotation],
                     data_dir: str | Path) -> None:
    path = Path(data_dir) / ANNOTATIONS_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as out:
        for anno in annotations.values():
            obj = {
                "scene_id": anno.scene_id,
                "establishing_shot_id": anno.establishing_shot_id,
                "establishing_frame_id": anno.establishing_frame_id,
                "frames": [{
                    "frame_id": s.frame_id,
                    "p_loc": s.p_loc,
                    "p_loc_recog": s.p_loc_recog,
                    "p_time": s.p_time,
                    "p_time_recog": s.p_time_recog,
                    "casts": [{"cast_id": e.cast_id, "c_recog": e.c_recog,
                               "gender": e.gender, "age": e.age}
                              for e in anno.casts[s.frame_id].entries],
                } for s in anno.settings.values()],
                "recognizable_frames": {cid: list(fids) for cid, fids
                                        in anno.recognizable_frames.items()},
            }
            out.write(json.dumps(obj, ensure_ascii=False,
                                 separators=(",", ":")) + "\n")


def load_annotations(data_dir: str | Path) -> dict[str, SceneAnnotation]:
    path = Path(data_dir) / ANNOTATIONS_FILE
    annotations: dict[str, SceneAnnotation] = {}
    with path.open("r", encoding="utf-8") as handle:
        for raw in handle:
            raw = raw.strip()
            if not raw:
                continue
            obj = json.loads(raw)
            settings = {}
            casts = {}
            for fr in obj["frames"]:
                settings[fr["frame_id"]] = FrameSettingAnnotation(
                    frame_id=fr["frame_id"], p_loc=fr["p_loc"],
                    p_loc_recog=fr["p_loc_recog"], p_time=fr["p_time"],
                    p_time_recog=fr["p_time_recog"])
                casts[fr["frame_id"]] = FrameCastAnnotation(
                    frame_id=fr["frame_id"],
                    entries=tuple(CastRecogEntry(cast_id=e["cast_id"],
                                                 c_recog=e["c_recog"],
                                                 gender=e["gender"], age=e["age"])
                                  for e in fr["casts"]))
            annotations[obj["scene_id"]] = SceneAnnotation(
                scene_id=obj["scene_id"],
                establishing_shot_id=obj["establishing_shot_id"],
                establishing_frame_id=obj["establishing_frame_id"],
                settings=settings, casts=casts,
                recognizable_frames={cid: tuple(fids) for cid, fids
                                     in obj["recognizable_frames"].items()},
            )
    return annotations


def annotations_path(data_dir: str | Path) -> Path:
    return Path(data_dir) / ANNOTATIONS_FILE
