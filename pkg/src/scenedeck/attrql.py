"""The SQL-like attribute query language.

A query is a flat conjunction of constraints over the scene setting, the
characters, and the movie metadata::

    select Place=Bedroom where MovieYear>1980, Time-of-day=Variable,
           Character1Gender=Female where Character1Age>40 and Character2=Jean

Grammar (keywords and attribute names are case-insensitive)::

    query := "select" constraint (sep constraint)* | ""
    sep   := "," | "where" | "and"
    cons  := attr cmp value
    cmp   := "=" | ">" | "<" | ">=" | "<="
    value := "Variable" | integer | word+

The three separators are interchangeable: guards never scope, every
constraint lands in the same conjunction.  Values may span several words
("Snowy Forest", "Canyon in Desert"); a value ends at the next separator.

Recognized attributes: Place, Time-of-day, MovieYear, MovieGenre,
MovieName, CharacterCount, CharacterN, CharacterNGender, CharacterNAge
(N >= 1).  ``Variable`` is accepted only where diversification is
meaningful: Place, Time-of-day, CharacterNGender, and CharacterNAge.
An attribute left out entirely is unspecified and is treated as variable
downstream.  Character slot N refers to the N-th script character by
order of first appearance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ConflictingConstraint, ParseError, UnknownAttribute

_AGE_MIN = 1


class _Marker:
    """Singleton constraint state (used for Variable / Unspecified)."""

    __slots__ = ("_name",)

    def __init__(self, name: str):
        self._name = name

    def __repr__(self) -> str:
        return self._name


VARIABLE = _Marker("Variable")
UNSPECIFIED = _Marker("Unspecified")


@dataclass(frozen=True)
class Fixed:
    """A fixed attribute value every result must satisfy."""

    value: str


@dataclass(frozen=True)
class Comparison:
    """A single integer comparison, e.g. (">" , 40)."""

    op: str
    value: int

    def holds(self, x: int) -> bool:
        if self.op == "=":
            return x == self.value
        if self.op == "<":
            return x < self.value
        if self.op == ">":
            return x > self.value
        if self.op == "<=":
            return x <= self.value
        return x >= self.value


@dataclass(frozen=True)
class SettingConstraints:
    location: object = UNSPECIFIED   # Fixed | VARIABLE | UNSPECIFIED
    time_of_day: object = UNSPECIFIED

    def __post_init__(self):
        if isinstance(self.location, Fixed) and not self.location.value.strip():
            raise ConflictingConstraint("Place", "empty location text")


@dataclass(frozen=True)
class CharacterConstraints:
    identity: str | None = None
    gender: object = UNSPECIFIED     # Fixed | VARIABLE | UNSPECIFIED
    age: object = UNSPECIFIED        # frozenset[Comparison] | VARIABLE | UNSPECIFIED


@dataclass(frozen=True)
class MovieConstraints:
    year: object = UNSPECIFIED       # frozenset[Comparison] | UNSPECIFIED
    genre: object = UNSPECIFIED      # Fixed | UNSPECIFIED
    title: object = UNSPECIFIED      # Fixed | UNSPECIFIED


@dataclass(frozen=True)
class AttributeQuery:
    setting: SettingConstraints = field(default_factory=SettingConstraints)
    characters: dict = field(default_factory=dict)   # slot index (1-based) -> CharacterConstraints
    movie: MovieConstraints = field(default_factory=MovieConstraints)
    character_count: int | None = None


_TOKEN_RE = re.compile(
    r"(?P<op>>=|<=|=|>|<)|(?P<comma>,)|(?P<int>\d+)|(?P<word>[A-Za-z][A-Za-z0-9'_\-]*)"
)
_CHARACTER_ATTR_RE = re.compile(r"^character([0-9]+)(gender|age)?$")
_SEPARATOR_WORDS = frozenset({"where", "and"})


@dataclass(frozen=True)
class _Token:
    kind: str   # "op" | "comma" | "int" | "word"
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(source)
    while i < n:
        if source[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(source, i)
        if not m:
            raise ParseError(f"unexpected character {source[i]!r}", position=i)
        kind = m.lastgroup
        tokens.append(_Token(kind=kind, text=m.group(), pos=i))
        i = m.end()
    return tokens


def _resolve_attr(token: _Token) -> tuple[str, int | None]:
    """Map an attribute word to its canonical key and optional slot index."""
    name = token.text.lower()
    if name == "place":
        return "Place", None
    if name == "time-of-day":
        return "Time-of-day", None
    if name == "movieyear":
        return "MovieYear", None
    if name == "moviegenre":
        return "MovieGenre", None
    if name == "moviename":
        return "MovieName", None
    if name == "charactercount":
        return "CharacterCount", None
    m = _CHARACTER_ATTR_RE.match(name)
    if m:
        slot = int(m.group(1))
        if slot >= 1:
            kind = m.group(2)
            if kind == "gender":
                return f"Character{slot}Gender", slot
            if kind == "age":
                return f"Character{slot}Age", slot
            return f"Character{slot}", slot
    raise UnknownAttribute(token.text, position=token.pos)


class _SlotState:
    __slots__ = ("identity", "gender", "age")

    def __init__(self):
        self.identity = None
        self.gender = UNSPECIFIED
        self.age = UNSPECIFIED


def _interval(comps: frozenset[Comparison], lo: float) -> bool:
    """Whether an integer in [lo, inf) satisfies every comparison."""
    hi = float("inf")
    for c in comps:
        if c.op == "=":
            lo = max(lo, c.value)
            hi = min(hi, c.value)
        elif c.op == ">":
            lo = max(lo, c.value + 1)
        elif c.op == ">=":
            lo = max(lo, c.value)
        elif c.op == "<":
            hi = min(hi, c.value - 1)
        else:
            hi = min(hi, c.value)
    return lo <= hi


def parse_query(source: str) -> AttributeQuery:
    """Parse query text into an :class:`AttributeQuery`.

    Empty (or whitespace-only) input yields an all-unspecified query.
    Raises :class:`ParseError`, :class:`UnknownAttribute`, or
    :class:`ConflictingConstraint`.
    """
    tokens = _tokenize(source)
    if not tokens:
        return AttributeQuery()

    head = tokens[0]
    if head.kind != "word" or head.text.lower() != "select":
        raise ParseError("query must start with 'select'", position=head.pos)

    location: object = UNSPECIFIED
    time_of_day: object = UNSPECIFIED
    year_comps: set[Comparison] | None = None
    genre: object = UNSPECIFIED
    title: object = UNSPECIFIED
    count: int | None = None
    slots: dict[int, _SlotState] = {}

    def conflict_if(already: bool, attr: str) -> None:
        if already:
            raise ConflictingConstraint(attr, "attribute constrained more than once")

    idx = 1
    end = len(tokens)

    def parse_value(attr: str) -> tuple[str, int, bool]:
        """Collect value words; returns (text, start pos, is_variable)."""
        nonlocal idx
        if idx >= end:
            raise ParseError(f"expected a value for {attr}",
                             position=tokens[idx - 1].pos)
        tok = tokens[idx]
        if tok.kind not in ("word", "int"):
            raise ParseError(f"expected a value for {attr}", position=tok.pos)
        if tok.kind == "word" and tok.text.lower() == "variable":
            idx += 1
            return "Variable", tok.pos, True
        words = []
        start = tok.pos
        while idx < end and tokens[idx].kind in ("word", "int") \
                and tokens[idx].text.lower() not in _SEPARATOR_WORDS:
            words.append(tokens[idx].text)
            idx += 1
        return " ".join(words), start, False

    while True:
        if idx >= end:
            raise ParseError("expected an attribute name",
                             position=tokens[idx - 1].pos)
        tok = tokens[idx]
        if tok.kind != "word":
            raise ParseError("expected an attribute name", position=tok.pos)
        attr, slot = _resolve_attr(tok)
        idx += 1
        if idx >= end or tokens[idx].kind != "op":
            pos = tokens[idx].pos if idx < end else tok.pos
            raise ParseError(f"expected a comparison operator after {attr}",
                             position=pos)
        op_tok = tokens[idx]
        op = op_tok.text
        idx += 1
        value, value_pos, is_variable = parse_value(attr)

        if attr in ("MovieYear", "CharacterCount") or attr.endswith("Age"):
            numeric = not is_variable
        else:
            numeric = False
        if numeric and not value.isdigit():
            raise ParseError(f"{attr} takes an integer value", position=value_pos)
        if op != "=" and not (attr == "MovieYear" or attr.endswith("Age")):
            raise ParseError(f"{attr} only supports '='", position=op_tok.pos)
        if is_variable and op != "=":
            raise ParseError("'Variable' requires '='", position=op_tok.pos)

        if attr == "Place":
            conflict_if(location is not UNSPECIFIED, attr)
            location = VARIABLE if is_variable else Fixed(value)
        elif attr == "Time-of-day":
            conflict_if(time_of_day is not UNSPECIFIED, attr)
            if is_variable:
                time_of_day = VARIABLE
            else:
                norm = value.lower()
                if norm not in ("day", "night"):
                    raise ParseError("Time-of-day takes 'day', 'night', or 'Variable'",
                                     position=value_pos)
                time_of_day = Fixed(norm)
        elif attr == "MovieYear":
            if is_variable:
                raise ParseError("MovieYear cannot be Variable", position=value_pos)
            if year_comps is None:
                year_comps = set()
            year_comps.add(Comparison(op, int(value)))
        elif attr == "MovieGenre":
            if is_variable:
                raise ParseError("MovieGenre cannot be Variable", position=value_pos)
            conflict_if(genre is not UNSPECIFIED, attr)
            genre = Fixed(value)
        elif attr == "MovieName":
            if is_variable:
                raise ParseError("MovieName cannot be Variable", position=value_pos)
            conflict_if(title is not UNSPECIFIED, attr)
            title = Fixed(value)
        elif attr == "CharacterCount":
            if is_variable:
                raise ParseError("CharacterCount cannot be Variable", position=value_pos)
            conflict_if(count is not None, attr)
            number = int(value)
            if number < 1:
                raise ParseError("CharacterCount must be a positive integer",
                                 position=value_pos)
            count = number
        else:
            state = slots.setdefault(slot, _SlotState())
            if attr.endswith("Gender"):
                conflict_if(state.gender is not UNSPECIFIED, attr)
                if is_variable:
                    state.gender = VARIABLE
                else:
                    norm = value.lower()
                    if norm not in ("male", "female"):
                        raise ParseError(f"{attr} takes 'male', 'female', or 'Variable'",
                                         position=value_pos)
                    state.gender = Fixed(norm)
            elif attr.endswith("Age"):
                if is_variable:
                    conflict_if(state.age is not UNSPECIFIED, attr)
                    state.age = VARIABLE
                else:
                    if state.age is VARIABLE:
                        raise ConflictingConstraint(attr, "both Variable and fixed")
                    if state.age is UNSPECIFIED:
                        state.age = set()
                    state.age.add(Comparison(op, int(value)))
            else:
                if is_variable:
                    raise ParseError(f"{attr} names a cast member and cannot be Variable",
                                     position=value_pos)
                conflict_if(state.identity is not None, attr)
                state.identity = value

        if idx >= end:
            break
        sep = tokens[idx]
        if sep.kind == "comma" or (sep.kind == "word"
                                   and sep.text.lower() in _SEPARATOR_WORDS):
            idx += 1
            continue
        raise ParseError("expected ',', 'where', or 'and'", position=sep.pos)

    if year_comps is not None and not _interval(frozenset(year_comps), float("-inf")):
        raise ConflictingConstraint("MovieYear", "unsatisfiable comparisons")

    characters = {}
    for slot, state in sorted(slots.items()):
        age = state.age
        if isinstance(age, set):
            age = frozenset(age)
            if not _interval(age, _AGE_MIN):
                raise ConflictingConstraint(f"Character{slot}Age",
                                            "unsatisfiable comparisons")
        characters[slot] = CharacterConstraints(identity=state.identity,
                                                gender=state.gender, age=age)

    year = frozenset(year_comps) if year_comps is not None else UNSPECIFIED
    return AttributeQuery(
        setting=SettingConstraints(location=location, time_of_day=time_of_day),
        characters=characters,
        movie=MovieConstraints(year=year, genre=genre, title=title),
        character_count=count,
    )


_OP_ORDER = {"=": 0, "<": 1, "<=": 2, ">": 3, ">=": 4}


def _sorted_comps(comps: frozenset[Comparison]) -> list[Comparison]:
    return sorted(comps, key=lambda c: (_OP_ORDER[c.op], c.value))


def render_query(query: AttributeQuery) -> str:
    """Render the canonical text for a query; ``parse_query`` inverts it.

    An all-unspecified query renders as the empty string.
    """
    parts: list[str] = []

    def state_text(state: object) -> str:
        if state is VARIABLE:
            return "Variable"
        return state.value  # Fixed

    if query.setting.location is not UNSPECIFIED:
        parts.append(f"Place={state_text(query.setting.location)}")
    if query.setting.time_of_day is not UNSPECIFIED:
        tod = query.setting.time_of_day
        text = "Variable" if tod is VARIABLE else tod.value.capitalize()
        parts.append(f"Time-of-day={text}")
    if query.movie.year is not UNSPECIFIED:
        for comp in _sorted_comps(query.movie.year):
            parts.append(f"MovieYear{comp.op}{comp.value}")
    if query.movie.genre is not UNSPECIFIED:
        parts.append(f"MovieGenre={query.movie.genre.value}")
    if query.movie.title is not UNSPECIFIED:
        parts.append(f"MovieName={query.movie.title.value}")
    if query.character_count is not None:
        parts.append(f"CharacterCount={query.character_count}")
    for slot in sorted(query.characters):
        cons = query.characters[slot]
        if cons.identity is not None:
            parts.append(f"Character{slot}={cons.identity}")
        if cons.gender is not UNSPECIFIED:
            text = "Variable" if cons.gender is VARIABLE else cons.gender.value.capitalize()
            parts.append(f"Character{slot}Gender={text}")
        if cons.age is VARIABLE:
            parts.append(f"Character{slot}Age=Variable")
        elif cons.age is not UNSPECIFIED:
            for comp in _sorted_comps(cons.age):
                parts.append(f"Character{slot}Age{comp.op}{comp.value}")

    if not parts:
        return ""
    return "select " + ", ".join(parts)
