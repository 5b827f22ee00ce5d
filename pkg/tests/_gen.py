"""Seeded random generators shared by the test suite."""

from __future__ import annotations

import random

from scenedeck.attrql import (UNSPECIFIED, VARIABLE, AttributeQuery,
                              CharacterConstraints, Comparison, Fixed,
                              MovieConstraints, SettingConstraints, _interval)

NAMES = ["ALICE", "BOB", "MR. HARRISON", "JAMES", "DR. GREY", "EVE",
         "CAPTAIN REX", "SAM", "DAVE", "STELLA", "JOHN", "N-7"]

_WORDS = ("the old lamp still hums near a window while rain keeps tapping "
          "its slow answer and nobody moves for a long moment").split()

_LOCATION_VALUES = ["Bedroom", "Kitchen", "dining room", "Snowy Forest",
                    "Ice Cave", "Canyon in Desert", "restaurant", "Car"]
_GENRE_VALUES = ["drama", "comedy", "thriller", "western"]
_IDENTITY_VALUES = ["Jean", "Alice", "Victor", "Mona"]


def _sentence(rng: random.Random, lo: int = 3, hi: int = 9) -> str:
    k = rng.randint(lo, hi)
    words = [rng.choice(_WORDS) for _ in range(k)]
    return " ".join(words).capitalize() + "."


def random_script(rng: random.Random) -> tuple[str, list[tuple[str, str]]]:
    """Screenplay source plus its expected (character, text) sequence."""
    chunks: list[str] = []
    expected: list[tuple[str, str]] = []

    if rng.random() < 0.6:
        place = rng.choice(["BEDROOM", "KITCHEN", "STREET", "DINER"])
        tod = rng.choice(["DAY", "NIGHT"])
        chunks.append(f"{rng.choice(['INT.', 'EXT.'])} {place} - {tod}")

    cast = rng.sample(NAMES, rng.randint(1, 4))
    n_blocks = rng.randint(1, 8)
    for _ in range(n_blocks):
        if rng.random() < 0.25:
            chunks.append(_sentence(rng))   # action paragraph
        name = rng.choice(cast)
        style = rng.random()
        if style < 0.25:
            text = _sentence(rng)
            chunks.append(f"{name}: {text}")
            expected.append((name, text))
        else:
            lines = [name]
            if rng.random() < 0.2:
                lines.append(f"({rng.choice(['whispering', 'beat', 'laughs'])})")
            parts = [_sentence(rng) for _ in range(rng.randint(1, 3))]
            lines.extend(parts)
            chunks.append("\n".join(lines))
            expected.append((name, " ".join(parts)))
    if rng.random() < 0.25:
        chunks.append(_sentence(rng))

    return "\n\n".join(chunks) + "\n", expected


def _random_comps(rng: random.Random, lo: int, hi: int,
                  floor: float) -> frozenset[Comparison]:
    while True:
        comps = frozenset(
            Comparison(rng.choice(["=", "<", ">", "<=", ">="]), rng.randint(lo, hi))
            for _ in range(rng.randint(1, 2)))
        if _interval(comps, floor):
            return comps


def random_query(rng: random.Random, max_slots: int = 3) -> AttributeQuery:
    """A random valid AttributeQuery (canonical: no all-default slots)."""
    roll = rng.random()
    if roll < 0.3:
        location = Fixed(rng.choice(_LOCATION_VALUES))
    elif roll < 0.5:
        location = VARIABLE
    else:
        location = UNSPECIFIED
    roll = rng.random()
    if roll < 0.25:
        time_of_day = Fixed(rng.choice(["day", "night"]))
    elif roll < 0.5:
        time_of_day = VARIABLE
    else:
        time_of_day = UNSPECIFIED

    year = _random_comps(rng, 1930, 2020, float("-inf")) \
        if rng.random() < 0.3 else UNSPECIFIED
    genre = Fixed(rng.choice(_GENRE_VALUES)) if rng.random() < 0.2 else UNSPECIFIED
    title = Fixed("The Golden Harbor 1") if rng.random() < 0.1 else UNSPECIFIED
    count = rng.randint(1, 4) if rng.random() < 0.15 else None

    characters = {}
    for slot in range(1, max_slots + 1):
        if rng.random() >= 0.4:
            continue
        identity = rng.choice(_IDENTITY_VALUES) if rng.random() < 0.3 else None
        roll = rng.random()
        if roll < 0.3:
            gender = Fixed(rng.choice(["male", "female"]))
        elif roll < 0.5:
            gender = VARIABLE
        else:
            gender = UNSPECIFIED
        roll = rng.random()
        if roll < 0.3:
            age = _random_comps(rng, 5, 90, 1)
        elif roll < 0.45:
            age = VARIABLE
        else:
            age = UNSPECIFIED
        if identity is None and gender is UNSPECIFIED and age is UNSPECIFIED:
            continue
        characters[slot] = CharacterConstraints(identity=identity, gender=gender,
                                                age=age)

    return AttributeQuery(
        setting=SettingConstraints(location=location, time_of_day=time_of_day),
        characters=characters,
        movie=MovieConstraints(year=year, genre=genre, title=title),
        character_count=count,
    )
