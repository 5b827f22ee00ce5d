"""Deterministic synthetic catalogs for tests and benchmarks.

Everything is a pure function of the :class:`SynthSpec`: one RNG seeded
from ``spec.seed`` drives all choices, so two runs write byte-identical
directories.  The generated data has planted structure the rest of the
engine can be checked against:

* every location tag gets a distinct random unit anchor vector;
* every frame embedding is the unit-normalized sum of its scene's tag
  anchor and Gaussian noise (sigma per component, default 0.25);
* per scene, one shot is picked as the intended establishing shot and
  its keyframe gets markedly smaller noise (scaled by 0.25 and swapped
  to be the scene minimum), so establishing-shot selection has a known
  right answer;
* every cast member gets at least one frame with a front face and a
  body bbox covering more than 10% of the frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .catalog import (CastAppearance, CastMember, Catalog, Frame, Movie, Scene,
                      Shot, save_catalog)

PLANT_NOISE_SCALE = 0.25

_BASE_LOCATIONS = [
    "bedroom", "kitchen", "living room", "dining room", "restaurant", "bar",
    "office", "street", "car", "park", "beach", "forest", "desert", "hospital",
    "classroom", "library", "church", "courtroom", "prison", "hotel lobby",
    "hallway", "bathroom", "garage", "rooftop", "subway", "train station",
    "airport", "warehouse", "factory", "farm", "mountain", "lake", "river",
    "bridge", "alley", "market", "shop", "theater", "stadium", "gym",
    "spaceship", "laboratory", "basement", "attic", "garden", "cemetery",
    "castle", "cave",
]

_TITLE_ADJECTIVES = ["Crimson", "Silent", "Broken", "Hidden", "Golden", "Last",
                     "Distant", "Burning", "Frozen", "Restless", "Hollow", "Pale"]
_TITLE_NOUNS = ["Harbor", "Letter", "Summer", "Garden", "Mirror", "Highway",
                "Orchard", "Signal", "Morning", "Crossing", "Lantern", "Tide"]
_CAST_NAMES = ["Alice", "Bob", "Clara", "David", "Elena", "Frank", "Grace",
               "Henry", "Irene", "Jack", "Karen", "Leo", "Mona", "Nate",
               "Olga", "Paul", "Quinn", "Rosa", "Sam", "Tess", "Uma",
               "Victor", "Wendy", "Xander", "Yara", "Zane"]

_GENRES = ["drama", "comedy", "thriller", "romance", "crime", "sci-fi",
           "western", "horror", "adventure", "mystery"]


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    n_movies: int = 2
    scenes_per_movie: int = 3
    shots_per_scene: int = 3
    frames_per_shot: int = 3
    casts_per_scene: int = 3
    location_vocab_size: int = 90
    embedding_dim: int = 512
    noise_sigma: float = 0.25
    write_images: bool = True

    def __post_init__(self):
        counts = (self.n_movies, self.scenes_per_movie, self.shots_per_scene,
                  self.frames_per_shot, self.casts_per_scene,
                  self.location_vocab_size, self.embedding_dim)
        if any(c < 1 for c in counts):
            raise ValueError("all synthetic spec counts must be >= 1")
        if self.casts_per_scene > len(_CAST_NAMES):
            raise ValueError(f"casts_per_scene is capped at {len(_CAST_NAMES)}")


@dataclass
class SynthResult:
    """In-memory synthetic data, before (or instead of) writing files."""

    catalog: Catalog
    frame_vectors: dict[str, np.ndarray]
    text_vectors: dict[str, np.ndarray]
    planted_establishing: dict[str, str]   # scene_id -> shot_id
    dim: int


def location_vocabulary(size: int) -> tuple[str, ...]:
    names = list(_BASE_LOCATIONS)
    i = 1
    while len(names) < size:
        names.append(f"set {i:02d}")
        i += 1
    return tuple(names[:size])


def _unit(v: np.ndarray) -> np.ndarray:
    return (v / np.linalg.norm(v)).astype(np.float32)


def synthesize(spec: SynthSpec) -> SynthResult:
    """Build a synthetic catalog and its embeddings in memory."""
    rng = np.random.default_rng(spec.seed)
    dim = spec.embedding_dim

    vocabulary = location_vocabulary(spec.location_vocab_size)
    text_vectors: dict[str, np.ndarray] = {}
    for tag in vocabulary:
        text_vectors[tag] = _unit(rng.standard_normal(dim))
    for tod in ("day", "night"):
        text_vectors[tod] = _unit(rng.standard_normal(dim))

    movies: dict[str, Movie] = {}
    scenes: dict[str, Scene] = {}
    shots: dict[str, Shot] = {}
    frames: dict[str, Frame] = {}
    frame_vectors: dict[str, np.ndarray] = {}
    planted: dict[str, str] = {}

    width, height = 192, 108

    for m in range(spec.n_movies):
        movie_id = f"m{m:04d}"
        title = (f"The {rng.choice(_TITLE_ADJECTIVES)} "
                 f"{rng.choice(_TITLE_NOUNS)} {m + 1}")
        genres = sorted(rng.choice(_GENRES, size=int(rng.integers(1, 3)),
                                   replace=False).tolist())
        movies[movie_id] = Movie(movie_id=movie_id, title=title,
                                 year=int(rng.integers(1930, 2021)),
                                 genres=tuple(genres))

        for s in range(spec.scenes_per_movie):
            scene_id = f"{movie_id}s{s:04d}"
            tag = vocabulary[int(rng.integers(0, len(vocabulary)))]
            scene_time = "night" if rng.random() < 0.5 else "day"

            name_picks = rng.choice(len(_CAST_NAMES), size=spec.casts_per_scene,
                                    replace=False)
            casts = tuple(
                CastMember(cast_id=f"c{c:02d}",
                           name=_CAST_NAMES[int(name_picks[c])],
                           gender="female" if rng.random() < 0.5 else "male",
                           age=int(rng.integers(18, 81)))
                for c in range(spec.casts_per_scene)
            )

            shot_ids = []
            scene_frames: list[Frame] = []
            ordinal = 0
            for t in range(spec.shots_per_scene):
                shot_id = f"{scene_id}t{t:02d}"
                shot_ids.append(shot_id)
                frame_ids = []
                for f in range(spec.frames_per_shot):
                    frame_id = f"{shot_id}f{f:02d}"
                    frame_ids.append(frame_id)
                    scene_frames.append(Frame(
                        frame_id=frame_id, shot_id=shot_id, ordinal=ordinal,
                        time_of_day=scene_time, width=width, height=height,
                        image_path=f"images/{frame_id}.png", appearances=(),
                    ))
                    ordinal += 1
                keyframe = frame_ids[int(rng.integers(0, len(frame_ids)))]
                shots[shot_id] = Shot(shot_id=shot_id, scene_id=scene_id,
                                      keyframe_id=keyframe,
                                      frame_ids=tuple(frame_ids))

            appearances: dict[str, list[CastAppearance]] = \
                {fr.frame_id: [] for fr in scene_frames}
            for cast in casts:
                guaranteed = int(rng.integers(0, len(scene_frames)))
                for idx, fr in enumerate(scene_frames):
                    planted_here = idx == guaranteed
                    if not planted_here and rng.random() >= 0.4:
                        continue
                    if planted_here or rng.random() < 0.6:
                        # clearly recognizable: front face, >10% area
                        w = int(width * 0.45)
                        h = int(height * 0.5)
                        front = True
                    else:
                        w = int(width * 0.2)
                        h = int(height * 0.3)
                        front = rng.random() < 0.5
                    x = int(rng.integers(0, width - w))
                    y = int(rng.integers(0, height - h))
                    face = None
                    if front:
                        face = (x + w // 4, y, max(1, w // 2), max(1, h // 3))
                    appearances[fr.frame_id].append(CastAppearance(
                        cast_id=cast.cast_id, body_bbox=(x, y, w, h),
                        face_bbox=face, front_face=front))

            anchor = text_vectors[tag].astype(np.float64)
            noise = rng.standard_normal((len(scene_frames), dim)) * spec.noise_sigma
            keyframe_rows = {}
            for t, shot_id in enumerate(shot_ids):
                shot = shots[shot_id]
                row = next(i for i, fr in enumerate(scene_frames)
                           if fr.frame_id == shot.keyframe_id)
                keyframe_rows[shot_id] = row
            planted_shot = shot_ids[int(rng.integers(0, len(shot_ids)))]
            noise[keyframe_rows[planted_shot]] *= PLANT_NOISE_SCALE
            norms = {sid: np.linalg.norm(noise[row])
                     for sid, row in keyframe_rows.items()}
            smallest = min(norms, key=lambda sid: (norms[sid], sid))
            if smallest != planted_shot:
                a, b = keyframe_rows[planted_shot], keyframe_rows[smallest]
                noise[[a, b]] = noise[[b, a]]
            planted[scene_id] = planted_shot

            for i, fr in enumerate(scene_frames):
                fr = Frame(
                    frame_id=fr.frame_id, shot_id=fr.shot_id, ordinal=fr.ordinal,
                    time_of_day=fr.time_of_day, width=fr.width, height=fr.height,
                    image_path=fr.image_path,
                    appearances=tuple(appearances[fr.frame_id]),
                )
                frames[fr.frame_id] = fr
                frame_vectors[fr.frame_id] = _unit(anchor + noise[i])

            scenes[scene_id] = Scene(scene_id=scene_id, movie_id=movie_id,
                                     location_tag=tag, shot_ids=tuple(shot_ids),
                                     casts=casts)

    catalog = Catalog(movies=movies, scenes=scenes, shots=shots, frames=frames,
                      location_vocabulary=vocabulary)
    return SynthResult(catalog=catalog, frame_vectors=frame_vectors,
                       text_vectors=text_vectors, planted_establishing=planted,
                       dim=dim)


def _write_images(result: SynthResult, out_dir: Path) -> None:
    from PIL import Image

    images_dir = out_dir / "images"
    images_dir.mkdir(parents=True, exist_ok=True)
    for frame in result.catalog.frames.values():
        if frame.time_of_day == "night":
            color = (24, 28, 52)       # mean luminance well below 0.35
        else:
            color = (188, 205, 226)    # and well above for day
        img = Image.new("RGB", (frame.width, frame.height), color)
        img.save(out_dir / frame.image_path, format="PNG")


def generate_synthetic(spec: SynthSpec, out_dir: str | Path) -> SynthResult:
    """Generate a synthetic data directory (catalog, embeddings, images)."""
    from .embeddings import write_store

    out_dir = Path(out_dir)
    result = synthesize(spec)
    save_catalog(result.catalog, out_dir)
    write_store(out_dir, result.dim, result.frame_vectors, result.text_vectors)
    if spec.write_images:
        _write_images(result, out_dir)
    return result
