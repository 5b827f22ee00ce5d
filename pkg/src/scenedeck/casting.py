"""Cast assignment and per-line frame selection.

Script characters (in order of first appearance) are matched to scene
cast members; all injective assignments that satisfy the fixed per-slot
constraints and leave every mapped cast with at least one recognizable
frame are enumerated, slots filled in order with casts tried in cast_id
order.

Frames follow the scene's own flow: starting from the establishing
frame, each dialogue line takes the speaker's next recognizable frame
strictly after the previous pick, wrapping to the speaker's earliest
recognizable frame (without moving the cursor) when none remain ahead.

``visualize`` glues the pipeline together: scenes come from retrieval,
every (scene, assignment) pair is one result row, and rows are
interleaved round-robin across the variable attribute values so that
consecutive rows differ where the writer asked for variety.
"""

from __future__ import annotations

from dataclasses import dataclass

from .annotate import SceneAnnotation
from .attrql import AttributeQuery, CharacterConstraints
from .catalog import Catalog, Scene, TIMES_OF_DAY
from .embeddings import EmbeddingStore, normalize_text
from .errors import InfeasibleCast, NoFrameForCharacter
from .retrieval import (SearchIndex, build_index, cast_matches_slot,
                        plan as build_plan, round_robin_interleave, search_index)
from .screenplay import Script


@dataclass(frozen=True)
class CastAssignment:
    scene_id: str
    mapping: dict   # character name -> cast_id, injective


@dataclass(frozen=True)
class LineFrame:
    line_index: int
    character: str
    frame_id: str


@dataclass
class VisualizationResult:
    scene_id: str
    movie_title: str
    movie_year: int
    assignment: CastAssignment
    establishing_frame_id: str
    line_frames: list[LineFrame]


def enumerate_assignments(scene: Scene, annotation: SceneAnnotation,
                          script: Script, query: AttributeQuery) -> list[CastAssignment]:
    """All valid injective mappings of script characters to casts.

    Raises :class:`InfeasibleCast` when none exists.
    """
    characters = script.characters
    casts = sorted(scene.casts, key=lambda c: c.cast_id)

    eligible: list[list[str]] = []
    for slot, character in enumerate(characters, start=1):
        cons = query.characters.get(slot, CharacterConstraints())
        picks = [cast.cast_id for cast in casts
                 if cast_matches_slot(cast, cons)
                 and annotation.recognizable_frames.get(cast.cast_id)]
        eligible.append(picks)

    out: list[CastAssignment] = []
    chosen: list[str] = []
    used: set[str] = set()

    def fill(slot: int) -> None:
        if slot == len(characters):
            mapping = dict(zip(characters, chosen))
            out.append(CastAssignment(scene_id=scene.scene_id, mapping=mapping))
            return
        for cast_id in eligible[slot]:
            if cast_id not in used:
                used.add(cast_id)
                chosen.append(cast_id)
                fill(slot + 1)
                chosen.pop()
                used.discard(cast_id)

    fill(0)
    if not out:
        raise InfeasibleCast(scene.scene_id)
    return out


def assign_frames(catalog: Catalog, annotation: SceneAnnotation, script: Script,
                  assignment: CastAssignment) -> VisualizationResult:
    """Pick the establishing frame plus one frame per dialogue line."""
    scene_id = assignment.scene_id
    movie = catalog.movie_of_scene(scene_id)
    establishing = annotation.establishing_frame_id

    per_cast: dict[str, list[tuple[int, str]]] = {}
    for cast_id, frame_ids in annotation.recognizable_frames.items():
        per_cast[cast_id] = [(catalog.frames[fid].ordinal, fid) for fid in frame_ids]

    cursor = catalog.frames[establishing].ordinal
    line_frames: list[LineFrame] = []
    for line in script.lines:
        cast_id = assignment.mapping[line.character]
        options = per_cast.get(cast_id)
        if not options:
            raise NoFrameForCharacter(line.character, scene_id)
        pick = next(((o, fid) for o, fid in options if o > cursor), None)
        if pick is not None:
            cursor = pick[0]
            frame_id = pick[1]
        else:
            frame_id = options[0][1]   # wrap; cursor stays put
        line_frames.append(LineFrame(line_index=line.index,
                                     character=line.character, frame_id=frame_id))

    return VisualizationResult(scene_id=scene_id, movie_title=movie.title,
                               movie_year=movie.year, assignment=assignment,
                               establishing_frame_id=establishing,
                               line_frames=line_frames)


def alternatives(scene: Scene, annotation: SceneAnnotation,
                 assignment: CastAssignment, line_character: str) -> list[str]:
    """Every frame of the scene showing the line's cast recognizably."""
    cast_id = assignment.mapping[line_character]
    return list(annotation.recognizable_frames.get(cast_id, ()))


def _axis_rank(axis_attr: str, scene: Scene, assignment: CastAssignment,
               script: Script, candidate_key: tuple,
               scene_axis_pos: dict[str, int], vocab_rank: dict[str, int]) -> int:
    """Canonical domain index of a row's value on one axis."""
    if axis_attr in scene_axis_pos:
        value = candidate_key[scene_axis_pos[axis_attr]]
        if axis_attr == "time_of_day":
            return TIMES_OF_DAY.index(value)
        return vocab_rank[normalize_text(value)]
    slot_part, kind = axis_attr.split(".")
    slot = int(slot_part.removeprefix("character"))
    character = script.characters[slot - 1]
    cast_id = assignment.mapping[character]
    cast = next(c for c in scene.casts if c.cast_id == cast_id)
    if kind == "gender":
        return 0 if cast.gender == "male" else 1
    return cast.age // 10


def visualize(catalog: Catalog, annotations: dict[str, SceneAnnotation],
              store: EmbeddingStore, script: Script, query: AttributeQuery,
              max_results: int = 20,
              index: SearchIndex | None = None) -> list[VisualizationResult]:
    """End-to-end retrieval: one coherent visualization per row.

    Scenes come from :func:`scenedeck.retrieval.search_index`; each valid
    cast assignment of a scene is a distinct candidate row, and rows are
    interleaved over all variable attribute values (scene-level and
    character-level together).  Scenes whose casts cannot be assigned are
    skipped.
    """
    search_plan = build_plan(query, script)
    if index is None:
        index = build_index(catalog, annotations, store)
    candidates = search_index(index, search_plan, max_results)

    # candidate.variable_key holds the scene-axis values in plan order
    scene_axis_pos = {attr: i for i, attr in enumerate(
        a.attr for a in search_plan.variable_axes
        if a.attr in ("location", "time_of_day"))}
    vocab_rank = {normalize_text(tag): i
                  for i, tag in enumerate(catalog.location_vocabulary)}

    row_axes = []
    for axis in search_plan.variable_axes:
        if axis.attr.startswith("character"):
            slot = int(axis.attr.split(".")[0].removeprefix("character"))
            if slot > len(script.characters):
                continue
        row_axes.append(axis.attr)

    cells: dict[tuple, list[tuple]] = {}
    emitted_any = False
    for cand in candidates:
        scene = catalog.scenes[cand.scene_id]
        annotation = annotations[cand.scene_id]
        try:
            assignments = enumerate_assignments(scene, annotation, script, query)
        except InfeasibleCast:
            continue
        emitted_any = True
        for assignment in assignments:
            key = tuple(_axis_rank(attr, scene, assignment, script,
                                   cand.variable_key, scene_axis_pos, vocab_rank)
                        for attr in row_axes)
            cells.setdefault(key, []).append((annotation, assignment))

    if not emitted_any:
        return []

    groups = [cells[key] for key in sorted(cells)]
    picked = round_robin_interleave(groups, max_results)
    return [assign_frames(catalog, annotation, script, assignment)
            for annotation, assignment in picked]
