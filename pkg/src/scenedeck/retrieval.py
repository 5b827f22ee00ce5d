"""Scene search: fixed-attribute filtering plus diversification.

The pipeline filters movies on fixed metadata, filters or ranks scenes
on the location constraint (exact tag match for vocabulary entries,
embedding similarity against establishing keyframes for free text),
checks cast feasibility, and finally interleaves results round-robin
across the value combinations of the variable attributes so that every
combination present among the survivors gets its fair share of rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attrql import (UNSPECIFIED, AttributeQuery, CharacterConstraints,
                     Comparison, Fixed, MovieConstraints)
from .annotate import SceneAnnotation
from .catalog import CastMember, Catalog, GENDERS, TIMES_OF_DAY
from .embeddings import EmbeddingStore, normalize_text
from .errors import NoScenesFound
from .screenplay import Script, character_count

AGE_DECADES = tuple(range(0, 130, 10))


@dataclass(frozen=True)
class Axis:
    """One variable attribute and the value domain it is diversified over.

    The location domain is resolved against the catalog vocabulary at
    search time and is stored here as ``None``.
    """

    attr: str
    domain: tuple | None


@dataclass(frozen=True)
class SceneCandidate:
    scene_id: str
    movie_id: str
    relevance: float
    variable_key: tuple


@dataclass
class SearchPlan:
    required_count: int
    movie_filters: MovieConstraints
    location_filter: str | None
    time_filter: str | None
    slot_constraints: dict[int, CharacterConstraints]
    variable_axes: list[Axis] = field(default_factory=list)


def plan(query: AttributeQuery, script: Script) -> SearchPlan:
    """Turn a query and a script into filters, axes, and feasibility needs.

    The required character count comes from the query when given, else
    from the script itself.  Variable and unspecified attributes become
    diversification axes: time-of-day over {day, night}, location over
    the catalog vocabulary, per-slot gender over {male, female}, and
    per-slot age over decades.
    """
    required = query.character_count
    if required is None:
        required = character_count(script)

    axes: list[Axis] = []
    location_filter = None
    if isinstance(query.setting.location, Fixed):
        location_filter = query.setting.location.value
    else:
        axes.append(Axis("location", None))
    time_filter = None
    if isinstance(query.setting.time_of_day, Fixed):
        time_filter = query.setting.time_of_day.value
    else:
        axes.append(Axis("time_of_day", TIMES_OF_DAY))

    slot_constraints: dict[int, CharacterConstraints] = {}
    for slot, cons in query.characters.items():
        if cons.identity is not None or isinstance(cons.gender, Fixed) \
                or isinstance(cons.age, frozenset):
            slot_constraints[slot] = cons

    for slot in range(1, required + 1):
        cons = query.characters.get(slot, CharacterConstraints())
        if not isinstance(cons.gender, Fixed):
            axes.append(Axis(f"character{slot}.gender", GENDERS))
        if not isinstance(cons.age, frozenset):
            axes.append(Axis(f"character{slot}.age", AGE_DECADES))

    return SearchPlan(required_count=required, movie_filters=query.movie,
                      location_filter=location_filter, time_filter=time_filter,
                      slot_constraints=slot_constraints, variable_axes=axes)


def comparisons_hold(comps: frozenset[Comparison], value: int) -> bool:
    return all(c.holds(value) for c in comps)


def cast_matches_slot(cast: CastMember, cons: CharacterConstraints) -> bool:
    """Whether a cast member satisfies a slot's fixed constraints."""
    if cons.identity is not None \
            and normalize_text(cast.name) != normalize_text(cons.identity):
        return False
    if isinstance(cons.gender, Fixed) and cast.gender != cons.gender.value:
        return False
    if isinstance(cons.age, frozenset) and not comparisons_hold(cons.age, cast.age):
        return False
    return True


def feasible_cast(casts: tuple[CastMember, ...], required_count: int,
                  slot_constraints: dict[int, CharacterConstraints]) -> bool:
    """Exhaustive bipartite feasibility of slots against a scene's casts."""
    n_slots = required_count
    if slot_constraints:
        n_slots = max(n_slots, max(slot_constraints))
    if len(casts) < n_slots:
        return False
    if not slot_constraints:
        return True

    eligible = []
    for slot in range(1, n_slots + 1):
        cons = slot_constraints.get(slot)
        if cons is None:
            eligible.append(list(range(len(casts))))
        else:
            picks = [i for i, cast in enumerate(casts) if cast_matches_slot(cast, cons)]
            if not picks:
                return False
            eligible.append(picks)

    # fill most-constrained slots first; plain backtracking is exact and
    # cheap at these cast counts
    order = sorted(range(n_slots), key=lambda s: len(eligible[s]))
    used: set[int] = set()

    def assign(k: int) -> bool:
        if k == n_slots:
            return True
        for i in eligible[order[k]]:
            if i not in used:
                used.add(i)
                if assign(k + 1):
                    return True
                used.discard(i)
        return False

    return assign(0)


def round_robin_interleave(groups: list[list], limit: int) -> list:
    """Cycle over groups in order, emitting each group's next item."""
    out: list = []
    cursors = [0] * len(groups)
    while len(out) < limit:
        progressed = False
        for g, group in enumerate(groups):
            if cursors[g] < len(group):
                out.append(group[cursors[g]])
                cursors[g] += 1
                progressed = True
                if len(out) >= limit:
                    break
        if not progressed:
            break
    return out


class SearchIndex:
    """Precomputed per-scene arrays for fast repeated searches."""

    def __init__(self, catalog: Catalog, annotations: dict[str, SceneAnnotation],
                 store: EmbeddingStore):
        self.catalog = catalog
        self.annotations = annotations
        self.store = store

        self.scene_ids = list(catalog.scenes.keys())
        n = len(self.scene_ids)
        self.vocab = list(catalog.location_vocabulary)
        self.vocab_index = {normalize_text(tag): i
                            for i, tag in enumerate(self.vocab)}
        movie_ids = list(catalog.movies.keys())
        movie_code = {mid: i for i, mid in enumerate(movie_ids)}
        self.movie_ids = movie_ids

        self.scene_movie = np.empty(n, dtype=np.int32)
        self.loc_code = np.empty(n, dtype=np.int32)
        self.time_code = np.empty(n, dtype=np.int8)
        self.cast_count = np.empty(n, dtype=np.int32)
        self.relevance = np.empty(n, dtype=np.float64)
        establishing_ids = []

        for i, scene_id in enumerate(self.scene_ids):
            scene = catalog.scenes[scene_id]
            anno = annotations[scene_id]
            self.scene_movie[i] = movie_code[scene.movie_id]
            self.loc_code[i] = self.vocab_index[normalize_text(scene.location_tag)]
            est_time = anno.settings[anno.establishing_frame_id].p_time
            self.time_code[i] = TIMES_OF_DAY.index(est_time)
            self.cast_count[i] = len(scene.casts)
            self.relevance[i] = anno.establishing_sum()
            establishing_ids.append(anno.establishing_frame_id)

        self.establishing_matrix = store.frame_matrix(establishing_ids) \
            .astype(np.float64)
        # survivors are walked in this order when ranking by recognizability
        self.relevance_order = sorted(
            range(n), key=lambda i: (-self.relevance[i], self.scene_ids[i]))

    def free_text_similarities(self, text: str) -> np.ndarray:
        """Clamped cosine of the query text against establishing keyframes."""
        emb = self.store.text_embedding(text).astype(np.float64)
        return np.clip(self.establishing_matrix @ emb, 0.0, 1.0)


def build_index(catalog: Catalog, annotations: dict[str, SceneAnnotation],
                store: EmbeddingStore) -> SearchIndex:
    return SearchIndex(catalog, annotations, store)


def _movie_allowed(movie, filters: MovieConstraints) -> bool:
    if filters.year is not UNSPECIFIED \
            and not comparisons_hold(filters.year, movie.year):
        return False
    if filters.genre is not UNSPECIFIED:
        wanted = normalize_text(filters.genre.value)
        if wanted not in {normalize_text(g) for g in movie.genres}:
            return False
    if filters.title is not UNSPECIFIED \
            and normalize_text(movie.title) != normalize_text(filters.title.value):
        return False
    return True


def _scene_axis_values(index: SearchIndex, scene_pos: int, axis: Axis):
    if axis.attr == "location":
        return int(index.loc_code[scene_pos])
    return int(index.time_code[scene_pos])


def search_index(index: SearchIndex, plan: SearchPlan,
                 max_results: int) -> list[SceneCandidate]:
    """Run the full scene pipeline against a prebuilt index."""
    if max_results < 1:
        raise ValueError("max_results must be positive")
    catalog = index.catalog
    n = len(index.scene_ids)

    movie_ok = np.array(
        [_movie_allowed(catalog.movies[mid], plan.movie_filters)
         for mid in index.movie_ids], dtype=bool)
    mask = movie_ok[index.scene_movie] if n else np.zeros(0, dtype=bool)

    free_text = False
    relevance = index.relevance
    if plan.location_filter is not None:
        key = normalize_text(plan.location_filter)
        code = index.vocab_index.get(key)
        if code is not None:
            mask &= index.loc_code == code
        else:
            free_text = True
            relevance = index.free_text_similarities(plan.location_filter)

    if plan.time_filter is not None:
        mask &= index.time_code == TIMES_OF_DAY.index(plan.time_filter)

    if plan.slot_constraints:
        for i in np.flatnonzero(mask):
            scene = catalog.scenes[index.scene_ids[i]]
            if not feasible_cast(scene.casts, plan.required_count,
                                 plan.slot_constraints):
                mask[i] = False
    else:
        mask &= index.cast_count >= plan.required_count

    if not mask.any():
        raise NoScenesFound()

    if free_text:
        survivors = np.flatnonzero(mask)
        ordered = sorted(survivors.tolist(),
                         key=lambda i: (-relevance[i], index.scene_ids[i]))
    else:
        ordered = [i for i in index.relevance_order if mask[i]]

    scene_axes = [a for a in plan.variable_axes
                  if a.attr in ("location", "time_of_day")]

    def candidate(i: int) -> SceneCandidate:
        values = []
        for axis in scene_axes:
            if axis.attr == "location":
                values.append(index.vocab[index.loc_code[i]])
            else:
                values.append(TIMES_OF_DAY[index.time_code[i]])
        return SceneCandidate(scene_id=index.scene_ids[i],
                              movie_id=catalog.scenes[index.scene_ids[i]].movie_id,
                              relevance=float(relevance[i]),
                              variable_key=tuple(values))

    if not scene_axes:
        return [candidate(i) for i in ordered[:max_results]]

    cells: dict[tuple, list[int]] = {}
    for i in ordered:
        key = tuple(_scene_axis_values(index, i, axis) for axis in scene_axes)
        cells.setdefault(key, []).append(i)
    groups = [cells[key] for key in sorted(cells)]
    picked = round_robin_interleave(groups, max_results)
    return [candidate(i) for i in picked]


def search(catalog: Catalog, annotations: dict[str, SceneAnnotation],
           store: EmbeddingStore, plan: SearchPlan,
           max_results: int) -> list[SceneCandidate]:
    """One-shot search; builds a transient index."""
    return search_index(build_index(catalog, annotations, store), plan, max_results)
