import random

import pytest

from scenedeck.errors import ParseError
from scenedeck.screenplay import (character_count, parse_script, render_script)

from _gen import random_script

WILL_SCENE = """INT. BEDROOM - NIGHT

MR. HARRISON
Come in, my boy.

JAMES
You wanted to see me?
"""


def test_cue_blocks():
    script = parse_script(WILL_SCENE)
    assert script.scene_heading == "INT. BEDROOM - NIGHT"
    assert script.characters == ("MR. HARRISON", "JAMES")
    assert [(l.character, l.text) for l in script.lines] == [
        ("MR. HARRISON", "Come in, my boy."),
        ("JAMES", "You wanted to see me?"),
    ]
    assert [l.index for l in script.lines] == [0, 1]


def test_colon_fallback():
    script = parse_script("ALICE: Hello.\nBOB: Hi.")
    assert script.characters == ("ALICE", "BOB")
    assert [(l.character, l.text) for l in script.lines] == [
        ("ALICE", "Hello."), ("BOB", "Hi.")]


def test_empty_input():
    with pytest.raises(ParseError) as err:
        parse_script("")
    assert err.value.line_number == 0


def test_whitespace_only_input():
    with pytest.raises(ParseError):
        parse_script("  \n\n   \n")


def test_heading_alone_has_no_content():
    with pytest.raises(ParseError):
        parse_script("INT. BEDROOM - NIGHT\n")


def test_cue_with_only_parenthetical():
    source = "ALICE\n(whispering)\n\nBOB\nHi.\n"
    with pytest.raises(ParseError) as err:
        parse_script(source)
    assert err.value.line_number == 1


def test_parenthetical_is_kept():
    script = parse_script("ALICE\n(whispering)\nCome closer.\n")
    assert script.lines[0].parenthetical == "whispering"
    assert script.lines[0].text == "Come closer."


def test_multiline_dialogue_joined():
    script = parse_script("ALICE\nFirst part\nsecond part.\n")
    assert script.lines[0].text == "First part second part."


def test_same_character_blocks_stay_distinct():
    source = "ALICE\nOne.\n\nALICE\nTwo.\n"
    script = parse_script(source)
    assert len(script.lines) == 2
    assert script.characters == ("ALICE",)


def test_character_count():
    script = parse_script("DAVE: Hot out here.\nSAM: Too hot.")
    assert character_count(script) == 2

    action_only = parse_script("A dusty road. Nobody in sight.")
    assert character_count(action_only) == 0

    rng = random.Random(3)
    lines = []
    for i in range(9):
        lines.append(f"{['ANA', 'BEN', 'CARA'][i % 3]}: Line {i} here.")
    script = parse_script("\n".join(lines))
    assert len(script.lines) == 9
    assert character_count(script) == 3


def test_cue_at_end_of_file_is_action():
    script = parse_script("ALICE: Hi.\n\nBOB\n")
    assert [(l.character, l.text) for l in script.lines] == [("ALICE", "Hi.")]
    assert "BOB" in script.action_blocks


def test_lowercase_colon_line_is_action():
    script = parse_script("Note: he leaves quietly.\n\nALICE: Hi.")
    assert script.characters == ("ALICE",)
    assert script.action_blocks == ("Note: he leaves quietly.",)


def test_cue_name_whitespace_collapsed():
    script = parse_script("MR.   HARRISON\nCome in.\n")
    assert script.characters == ("MR. HARRISON",)


def test_transition_like_line_is_action():
    script = parse_script("ALICE: Hi.\n\nCUT TO:\n\nBOB: Bye.")
    assert script.characters == ("ALICE", "BOB")
    assert "CUT TO:" in script.action_blocks


def test_generated_scripts_roundtrip():
    rng = random.Random(42)
    for _ in range(300):
        source, expected = random_script(rng)
        script = parse_script(source)
        assert [(l.character, l.text) for l in script.lines] == expected
        wanted_chars = list(dict.fromkeys(name for name, _ in expected))
        assert list(script.characters) == wanted_chars


def test_render_parse_fixpoint():
    rng = random.Random(7)
    for _ in range(200):
        source, _ = random_script(rng)
        script = parse_script(source)
        assert parse_script(render_script(script)) == script
