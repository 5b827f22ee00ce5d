"""Best-effort conversion from a MovieNet-style dump to the ingestion layout.

This reads one JSON document per movie from ``<src>/meta/*.json`` in the
shape below (a flattened view of the public annotation layers: scene
boundaries with place tags, shot boundaries with keyframes, per-frame
body boxes with identities, cast gender and age at production time) and
writes our catalog files.  It has not been validated against the real
release; treat it as a starting point.

Expected per-movie document::

    {
      "mid": "tt0000000", "title": "...", "year": 1994, "genres": ["drama"],
      "cast": [{"id": "nm0000001", "name": "...", "gender": "male", "age": 41}],
      "scenes": [{
        "place": "bedroom",
        "cast_ids": ["nm0000001", ...],
        "shots": [{
          "keyframe": 1,
          "frames": [{
            "img": "relative/path.jpg", "time_of_day": "day" | "night" | null,
            "width": 1920, "height": 800,
            "persons": [{"id": "nm0000001", "bbox": [x, y, w, h],
                         "face_bbox": [x, y, w, h] | null, "front": true}]
          }, ...]
        }, ...]
      }, ...]
    }

Frame ordinals are assigned by position, keyframes by index into the
shot's frame list, and the location vocabulary is the set of place tags
seen plus any extra tags passed in.
"""

from __future__ import annotations

import json
from pathlib import Path

from .catalog import (CastAppearance, CastMember, Catalog, Frame, Movie, Scene,
                      Shot, save_catalog)
from .errors import FormatError


def convert_movienet(src_dir: str | Path, out_dir: str | Path,
                     extra_locations: list[str] | None = None) -> Catalog:
    src_dir = Path(src_dir)
    meta_dir = src_dir / "meta"
    if not meta_dir.is_dir():
        raise FormatError("meta", 0, f"no meta/ directory under {src_dir}")

    movies: dict[str, Movie] = {}
    scenes: dict[str, Scene] = {}
    shots: dict[str, Shot] = {}
    frames: dict[str, Frame] = {}
    tags: dict[str, None] = {}

    for path in sorted(meta_dir.glob("*.json")):
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(path.name, 0, f"invalid JSON: {exc.msg}") from exc

        mid = doc["mid"]
        movies[mid] = Movie(movie_id=mid, title=doc["title"],
                            year=int(doc["year"]),
                            genres=tuple(doc.get("genres", [])))
        cast_meta = {c["id"]: c for c in doc.get("cast", [])}

        for s, scene_doc in enumerate(doc.get("scenes", [])):
            scene_id = f"{mid}s{s:04d}"
            tag = scene_doc["place"]
            tags.setdefault(tag, None)
            casts = tuple(
                CastMember(cast_id=cid, name=cast_meta[cid].get("name", cid),
                           gender=cast_meta[cid]["gender"],
                           age=int(cast_meta[cid]["age"]))
                for cid in scene_doc.get("cast_ids", []))

            shot_ids = []
            ordinal = 0
            for t, shot_doc in enumerate(scene_doc.get("shots", [])):
                shot_id = f"{scene_id}t{t:02d}"
                shot_ids.append(shot_id)
                frame_ids = []
                for f, frame_doc in enumerate(shot_doc.get("frames", [])):
                    frame_id = f"{shot_id}f{f:02d}"
                    frame_ids.append(frame_id)
                    appearances = tuple(
                        CastAppearance(
                            cast_id=p["id"], body_bbox=tuple(p["bbox"]),
                            face_bbox=tuple(p["face_bbox"]) if p.get("face_bbox") else None,
                            front_face=bool(p.get("front", False)))
                        for p in frame_doc.get("persons", []))
                    frames[frame_id] = Frame(
                        frame_id=frame_id, shot_id=shot_id, ordinal=ordinal,
                        time_of_day=frame_doc.get("time_of_day") or "day",
                        width=int(frame_doc["width"]), height=int(frame_doc["height"]),
                        image_path=f"images/{frame_doc['img']}",
                        appearances=appearances)
                    ordinal += 1
                keyframe_idx = int(shot_doc.get("keyframe", 0))
                shots[shot_id] = Shot(shot_id=shot_id, scene_id=scene_id,
                                      keyframe_id=frame_ids[keyframe_idx],
                                      frame_ids=tuple(frame_ids))

            scenes[scene_id] = Scene(scene_id=scene_id, movie_id=mid,
                                     location_tag=tag, shot_ids=tuple(shot_ids),
                                     casts=casts)

    for tag in extra_locations or []:
        tags.setdefault(tag, None)

    catalog = Catalog(movies=movies, scenes=scenes, shots=shots, frames=frames,
                      location_vocabulary=tuple(tags))
    save_catalog(catalog, out_dir)
    return catalog
