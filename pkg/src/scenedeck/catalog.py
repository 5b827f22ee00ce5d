"""The annotated movie corpus: data model, loading, and serialization.

A catalog lives in a data directory with this layout (JSONL files are
UTF-8, one object per line):

* ``catalog/movies.jsonl``    {"movie_id","title","year","genres":[...]}
* ``catalog/scenes.jsonl``    {"scene_id","movie_id","location_tag","shot_ids":[...],"casts":[...]}
* ``catalog/shots.jsonl``     {"shot_id","scene_id","keyframe_id","frame_ids":[...]}
* ``catalog/frames.jsonl``    {"frame_id","shot_id","ordinal","time_of_day","width","height","image_path","appearances":[...]}
* ``catalog/locations.txt``   one location tag per line (the vocabulary)
* ``images/...``              frame image files, served opaquely

``load_catalog`` validates the whole structure (referential integrity,
bounds, orderings) and the result is treated as immutable thereafter.
``save_catalog`` writes the canonical formatting, so write -> load ->
write is byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import DanglingReference, FormatError, InvariantViolation

GENDERS = ("male", "female")
TIMES_OF_DAY = ("day", "night")

# Mean keyframe luminance (0..1) below this counts as night when the
# ingested time_of_day is null.
NIGHT_LUMINANCE_THRESHOLD = 0.35


@dataclass(frozen=True)
class Movie:
    movie_id: str
    title: str
    year: int
    genres: tuple[str, ...]


@dataclass(frozen=True)
class CastMember:
    cast_id: str
    name: str
    gender: str
    age: int


@dataclass(frozen=True)
class Scene:
    scene_id: str
    movie_id: str
    location_tag: str
    shot_ids: tuple[str, ...]
    casts: tuple[CastMember, ...]


@dataclass(frozen=True)
class Shot:
    shot_id: str
    scene_id: str
    keyframe_id: str
    frame_ids: tuple[str, ...]


@dataclass(frozen=True)
class CastAppearance:
    cast_id: str
    body_bbox: tuple[int, int, int, int]
    face_bbox: tuple[int, int, int, int] | None
    front_face: bool


@dataclass(frozen=True)
class Frame:
    frame_id: str
    shot_id: str
    ordinal: int
    time_of_day: str
    width: int
    height: int
    image_path: str
    appearances: tuple[CastAppearance, ...]
    time_of_day_heuristic: bool = False


@dataclass
class Catalog:
    """Immutable annotated corpus, indexed by id."""

    movies: dict[str, Movie]
    scenes: dict[str, Scene]
    shots: dict[str, Shot]
    frames: dict[str, Frame]
    location_vocabulary: tuple[str, ...]

    def movie_of_scene(self, scene_id: str) -> Movie:
        return self.movies[self.scenes[scene_id].movie_id]

    def scene_of_frame(self, frame_id: str) -> Scene:
        return self.scenes[self.shots[self.frames[frame_id].shot_id].scene_id]

    def frames_of_scene(self, scene_id: str) -> list[Frame]:
        """Frames of a scene in temporal (shot, then frame) order."""
        out = []
        for shot_id in self.scenes[scene_id].shot_ids:
            for frame_id in self.shots[shot_id].frame_ids:
                out.append(self.frames[frame_id])
        return out

    def counts(self) -> tuple[int, int, int, int]:
        return (len(self.movies), len(self.scenes), len(self.shots), len(self.frames))


def _read_jsonl(path: Path):
    name = path.name
    if not path.exists():
        raise FormatError(name, 0, "file missing")
    with path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise FormatError(name, lineno, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise FormatError(name, lineno, "expected a JSON object")
            yield lineno, obj


def _field(obj: dict, key: str, kinds, file: str, lineno: int):
    if key not in obj:
        raise FormatError(file, lineno, f"missing field {key!r}")
    value = obj[key]
    if not isinstance(value, kinds) or isinstance(value, bool) and kinds is not bool:
        raise FormatError(file, lineno, f"field {key!r} has wrong type")
    return value


def _bbox(raw, key: str, file: str, lineno: int) -> tuple[int, int, int, int]:
    if (not isinstance(raw, list) or len(raw) != 4
            or any(isinstance(v, bool) or not isinstance(v, int) for v in raw)):
        raise FormatError(file, lineno, f"field {key!r} must be [x, y, w, h] integers")
    return tuple(raw)


def _keyframe_luminance(data_dir: Path, frame: Frame) -> float:
    from PIL import Image

    path = data_dir / frame.image_path
    with Image.open(path) as img:
        gray = img.convert("L")
        histogram = gray.histogram()
    total = sum(histogram)
    mean = sum(i * c for i, c in enumerate(histogram)) / (total * 255.0)
    return mean


def load_catalog(data_dir: str | Path, *, luminance_fallback: bool = True) -> Catalog:
    """Load and fully validate a catalog from ``data_dir``.

    When ``luminance_fallback`` is on, frames ingested with a null
    ``time_of_day`` are classified from their image's mean luminance and
    flagged ``time_of_day_heuristic``.
    """
    data_dir = Path(data_dir)
    cat_dir = data_dir / "catalog"

    movies: dict[str, Movie] = {}
    for lineno, obj in _read_jsonl(cat_dir / "movies.jsonl"):
        movie_id = _field(obj, "movie_id", str, "movies.jsonl", lineno)
        genres_raw = _field(obj, "genres", list, "movies.jsonl", lineno)
        if any(not isinstance(g, str) for g in genres_raw):
            raise FormatError("movies.jsonl", lineno, "genres must be strings")
        movie = Movie(
            movie_id=movie_id,
            title=_field(obj, "title", str, "movies.jsonl", lineno),
            year=_field(obj, "year", int, "movies.jsonl", lineno),
            genres=tuple(genres_raw),
        )
        if movie.year <= 1870:
            raise InvariantViolation(f"movie {movie_id!r}: year must be > 1870")
        if movie_id in movies:
            raise InvariantViolation(f"duplicate movie_id {movie_id!r}")
        movies[movie_id] = movie

    locations_path = cat_dir / "locations.txt"
    if not locations_path.exists():
        raise FormatError("locations.txt", 0, "file missing")
    vocabulary = tuple(
        line.strip() for line in locations_path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    )
    if len(set(vocabulary)) != len(vocabulary):
        raise InvariantViolation("location vocabulary contains duplicates")

    scenes: dict[str, Scene] = {}
    for lineno, obj in _read_jsonl(cat_dir / "scenes.jsonl"):
        scene_id = _field(obj, "scene_id", str, "scenes.jsonl", lineno)
        shot_ids = _field(obj, "shot_ids", list, "scenes.jsonl", lineno)
        casts_raw = _field(obj, "casts", list, "scenes.jsonl", lineno)
        casts = []
        for cast_obj in casts_raw:
            if not isinstance(cast_obj, dict):
                raise FormatError("scenes.jsonl", lineno, "casts must be objects")
            cast = CastMember(
                cast_id=_field(cast_obj, "cast_id", str, "scenes.jsonl", lineno),
                name=_field(cast_obj, "name", str, "scenes.jsonl", lineno),
                gender=_field(cast_obj, "gender", str, "scenes.jsonl", lineno),
                age=_field(cast_obj, "age", int, "scenes.jsonl", lineno),
            )
            if cast.gender not in GENDERS:
                raise FormatError("scenes.jsonl", lineno,
                                  f"cast gender must be one of {GENDERS}")
            if not 1 <= cast.age <= 120:
                raise InvariantViolation(
                    f"scene {scene_id!r}: cast age {cast.age} outside [1, 120]")
            casts.append(cast)
        scene = Scene(
            scene_id=scene_id,
            movie_id=_field(obj, "movie_id", str, "scenes.jsonl", lineno),
            location_tag=_field(obj, "location_tag", str, "scenes.jsonl", lineno),
            shot_ids=tuple(shot_ids),
            casts=tuple(casts),
        )
        if not scene.shot_ids:
            raise InvariantViolation(f"scene {scene_id!r} has no shots")
        if len({c.cast_id for c in scene.casts}) != len(scene.casts):
            raise InvariantViolation(f"scene {scene_id!r} has duplicate cast ids")
        if scene_id in scenes:
            raise InvariantViolation(f"duplicate scene_id {scene_id!r}")
        scenes[scene_id] = scene

    shots: dict[str, Shot] = {}
    for lineno, obj in _read_jsonl(cat_dir / "shots.jsonl"):
        shot_id = _field(obj, "shot_id", str, "shots.jsonl", lineno)
        frame_ids = _field(obj, "frame_ids", list, "shots.jsonl", lineno)
        shot = Shot(
            shot_id=shot_id,
            scene_id=_field(obj, "scene_id", str, "shots.jsonl", lineno),
            keyframe_id=_field(obj, "keyframe_id", str, "shots.jsonl", lineno),
            frame_ids=tuple(frame_ids),
        )
        if not shot.frame_ids:
            raise InvariantViolation(f"shot {shot_id!r} has no frames")
        if shot.keyframe_id not in shot.frame_ids:
            raise InvariantViolation(f"shot {shot_id!r}: keyframe not among its frames")
        if shot_id in shots:
            raise InvariantViolation(f"duplicate shot_id {shot_id!r}")
        shots[shot_id] = shot

    frames: dict[str, Frame] = {}
    pending_time: list[str] = []
    for lineno, obj in _read_jsonl(cat_dir / "frames.jsonl"):
        frame_id = _field(obj, "frame_id", str, "frames.jsonl", lineno)
        if "time_of_day" not in obj:
            raise FormatError("frames.jsonl", lineno, "missing field 'time_of_day'")
        time_of_day = obj["time_of_day"]
        if time_of_day is not None and time_of_day not in TIMES_OF_DAY:
            raise FormatError("frames.jsonl", lineno,
                              f"time_of_day must be one of {TIMES_OF_DAY} or null")
        appearances = []
        for app_obj in _field(obj, "appearances", list, "frames.jsonl", lineno):
            if not isinstance(app_obj, dict):
                raise FormatError("frames.jsonl", lineno, "appearances must be objects")
            face_raw = app_obj.get("face_bbox")
            appearances.append(CastAppearance(
                cast_id=_field(app_obj, "cast_id", str, "frames.jsonl", lineno),
                body_bbox=_bbox(_field(app_obj, "body_bbox", list, "frames.jsonl", lineno),
                                "body_bbox", "frames.jsonl", lineno),
                face_bbox=None if face_raw is None
                else _bbox(face_raw, "face_bbox", "frames.jsonl", lineno),
                front_face=_field(app_obj, "front_face", bool, "frames.jsonl", lineno),
            ))
        frame = Frame(
            frame_id=frame_id,
            shot_id=_field(obj, "shot_id", str, "frames.jsonl", lineno),
            ordinal=_field(obj, "ordinal", int, "frames.jsonl", lineno),
            time_of_day=time_of_day if time_of_day is not None else "day",
            width=_field(obj, "width", int, "frames.jsonl", lineno),
            height=_field(obj, "height", int, "frames.jsonl", lineno),
            image_path=_field(obj, "image_path", str, "frames.jsonl", lineno),
            appearances=tuple(appearances),
        )
        if frame.width <= 0 or frame.height <= 0:
            raise InvariantViolation(f"frame {frame_id!r}: non-positive dimensions")
        if frame_id in frames:
            raise InvariantViolation(f"duplicate frame_id {frame_id!r}")
        frames[frame_id] = frame
        if time_of_day is None:
            pending_time.append(frame_id)

    catalog = Catalog(movies=movies, scenes=scenes, shots=shots, frames=frames,
                      location_vocabulary=vocabulary)
    _validate_references(catalog)

    for frame_id in pending_time:
        frame = frames[frame_id]
        if not luminance_fallback:
            raise FormatError("frames.jsonl", 0,
                              f"frame {frame_id!r} has null time_of_day")
        try:
            luminance = _keyframe_luminance(data_dir, frame)
        except OSError as exc:
            raise FormatError("frames.jsonl", 0,
                              f"frame {frame_id!r} has null time_of_day and no "
                              f"readable image: {exc}") from exc
        value = "night" if luminance < NIGHT_LUMINANCE_THRESHOLD else "day"
        frames[frame_id] = replace(frame, time_of_day=value,
                                   time_of_day_heuristic=True)

    return catalog


def _validate_references(catalog: Catalog) -> None:
    vocab = set(catalog.location_vocabulary)
    shot_owner: dict[str, str] = {}
    for scene in catalog.scenes.values():
        if scene.movie_id not in catalog.movies:
            raise DanglingReference("movie", scene.movie_id)
        if scene.location_tag not in vocab:
            raise InvariantViolation(
                f"scene {scene.scene_id!r}: location tag {scene.location_tag!r} "
                f"not in vocabulary")
        for shot_id in scene.shot_ids:
            shot = catalog.shots.get(shot_id)
            if shot is None:
                raise DanglingReference("shot", shot_id)
            if shot.scene_id != scene.scene_id:
                raise InvariantViolation(
                    f"shot {shot_id!r} listed in scene {scene.scene_id!r} but "
                    f"declares scene {shot.scene_id!r}")
            if shot_id in shot_owner:
                raise InvariantViolation(f"shot {shot_id!r} appears in two scenes")
            shot_owner[shot_id] = scene.scene_id
    for shot in catalog.shots.values():
        if shot.shot_id not in shot_owner:
            if shot.scene_id not in catalog.scenes:
                raise DanglingReference("scene", shot.scene_id)
            raise InvariantViolation(f"shot {shot.shot_id!r} not listed in its scene")

    frame_owner: dict[str, str] = {}
    for shot in catalog.shots.values():
        for frame_id in shot.frame_ids:
            frame = catalog.frames.get(frame_id)
            if frame is None:
                raise DanglingReference("frame", frame_id)
            if frame.shot_id != shot.shot_id:
                raise InvariantViolation(
                    f"frame {frame_id!r} listed in shot {shot.shot_id!r} but "
                    f"declares shot {frame.shot_id!r}")
            if frame_id in frame_owner:
                raise InvariantViolation(f"frame {frame_id!r} appears in two shots")
            frame_owner[frame_id] = shot.shot_id
    for frame in catalog.frames.values():
        if frame.frame_id not in frame_owner:
            if frame.shot_id not in catalog.shots:
                raise DanglingReference("shot", frame.shot_id)
            raise InvariantViolation(f"frame {frame.frame_id!r} not listed in its shot")

    for scene in catalog.scenes.values():
        cast_ids = {c.cast_id for c in scene.casts}
        last_ordinal = None
        for frame in catalog.frames_of_scene(scene.scene_id):
            if last_ordinal is not None and frame.ordinal <= last_ordinal:
                raise InvariantViolation(
                    f"scene {scene.scene_id!r}: frame ordinals not strictly increasing")
            last_ordinal = frame.ordinal
            for app in frame.appearances:
                if app.cast_id not in cast_ids:
                    raise DanglingReference("cast", app.cast_id)
                boxes = [app.body_bbox] + ([app.face_bbox] if app.face_bbox else [])
                for (x, y, w, h) in boxes:
                    if w <= 0 or h <= 0 or x < 0 or y < 0 \
                            or x + w > frame.width or y + h > frame.height:
                        raise InvariantViolation(
                            f"frame {frame.frame_id!r}: bbox {x, y, w, h} outside bounds")


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def save_catalog(catalog: Catalog, data_dir: str | Path) -> None:
    """Write the canonical on-disk form of a catalog."""
    cat_dir = Path(data_dir) / "catalog"
    cat_dir.mkdir(parents=True, exist_ok=True)

    with (cat_dir / "movies.jsonl").open("w", encoding="utf-8") as out:
        for movie in catalog.movies.values():
            out.write(_dump({"movie_id": movie.movie_id, "title": movie.title,
                             "year": movie.year, "genres": list(movie.genres)}) + "\n")

    with (cat_dir / "scenes.jsonl").open("w", encoding="utf-8") as out:
        for scene in catalog.scenes.values():
            out.write(_dump({
                "scene_id": scene.scene_id,
                "movie_id": scene.movie_id,
                "location_tag": scene.location_tag,
                "shot_ids": list(scene.shot_ids),
                "casts": [{"cast_id": c.cast_id, "name": c.name,
                           "gender": c.gender, "age": c.age} for c in scene.casts],
            }) + "\n")

    with (cat_dir / "shots.jsonl").open("w", encoding="utf-8") as out:
        for shot in catalog.shots.values():
            out.write(_dump({"shot_id": shot.shot_id, "scene_id": shot.scene_id,
                             "keyframe_id": shot.keyframe_id,
                             "frame_ids": list(shot.frame_ids)}) + "\n")

    with (cat_dir / "frames.jsonl").open("w", encoding="utf-8") as out:
        for frame in catalog.frames.values():
            out.write(_dump({
                "frame_id": frame.frame_id,
                "shot_id": frame.shot_id,
                "ordinal": frame.ordinal,
                "time_of_day": frame.time_of_day,
                "width": frame.width,
                "height": frame.height,
                "image_path": frame.image_path,
                "appearances": [{
                    "cast_id": a.cast_id,
                    "body_bbox": list(a.body_bbox),
                    "face_bbox": list(a.face_bbox) if a.face_bbox else None,
                    "front_face": a.front_face,
                } for a in frame.appearances],
            }) + "\n")

    (cat_dir / "locations.txt").write_text(
        "".join(tag + "\n" for tag in catalog.location_vocabulary), encoding="utf-8")
