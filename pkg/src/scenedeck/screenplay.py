"""Screenplay text parsing.

The parser understands the conventional courier layout in a single pass:

* a line made up entirely of uppercase letters, digits, spaces, periods,
  and hyphens, preceded by a blank line (or the start of the input) and
  followed by a non-blank line, is a character cue;
* the non-blank lines under a cue, up to the next blank line, are that
  cue's dialogue, joined with single spaces; a parenthesized first line
  is kept separately as a parenthetical;
* a line beginning with ``INT.``, ``EXT.``, or ``INT-EXT.`` is a scene
  heading (only the first one is kept, the tool works on one scene);
* the compact one-line form ``NAME: dialogue`` (uppercase name) is also
  accepted;
* everything else is action, grouped into blank-separated blocks.

Character names are uppercase with runs of whitespace collapsed, and two
dialogue blocks by the same character stay distinct lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError

_CUE_RE = re.compile(r"^[A-Z0-9 .\-]+$")
_INLINE_RE = re.compile(r"^([A-Z0-9 .\-]+):\s*(\S.*)$")
_HEADING_PREFIXES = ("INT.", "EXT.", "INT-EXT.")


@dataclass(frozen=True)
class DialogueLine:
    """One character-tagged dialogue line, in source order."""

    index: int
    character: str
    text: str
    parenthetical: str | None = None


@dataclass(frozen=True)
class Script:
    """A parsed screenplay fragment."""

    scene_heading: str | None
    action_blocks: tuple[str, ...]
    lines: tuple[DialogueLine, ...]
    characters: tuple[str, ...]


def _normalize_name(name: str) -> str:
    return " ".join(name.split()).upper()


def parse_script(source: str) -> Script:
    """Parse screenplay text into a :class:`Script`.

    Raises :class:`ParseError` when a character cue has no dialogue, or
    when the input contains neither dialogue nor action.
    """
    raw_lines = source.split("\n")
    stripped = [line.strip() for line in raw_lines]
    n = len(raw_lines)

    heading: str | None = None
    actions: list[str] = []
    lines: list[DialogueLine] = []
    characters: dict[str, None] = {}
    action_buf: list[str] = []

    def flush_action() -> None:
        if action_buf:
            actions.append(" ".join(action_buf))
            action_buf.clear()

    def add_line(number: int, name: str, text: str, parenthetical: str | None) -> None:
        name = _normalize_name(name)
        text = " ".join(text.split())
        if not text:
            raise ParseError(f"character cue {name!r} has no dialogue",
                             line_number=number)
        characters.setdefault(name, None)
        lines.append(DialogueLine(index=len(lines), character=name,
                                  text=text, parenthetical=parenthetical))

    i = 0
    while i < n:
        text = stripped[i]
        if not text:
            flush_action()
            i += 1
            continue

        if text.startswith(_HEADING_PREFIXES):
            flush_action()
            if heading is None:
                heading = text
            i += 1
            continue

        prev_blank = i == 0 or not stripped[i - 1]
        next_nonblank = i + 1 < n and bool(stripped[i + 1])
        if _CUE_RE.match(text) and prev_blank and next_nonblank:
            flush_action()
            cue_line = i + 1
            j = i + 1
            parenthetical = None
            parts: list[str] = []
            while j < n and stripped[j]:
                body = stripped[j]
                if j == i + 1 and body.startswith("(") and body.endswith(")"):
                    parenthetical = body[1:-1].strip()
                else:
                    parts.append(body)
                j += 1
            add_line(cue_line, text, " ".join(parts), parenthetical)
            i = j
            continue

        inline = _INLINE_RE.match(text)
        if inline:
            flush_action()
            add_line(i + 1, inline.group(1), inline.group(2), None)
            i += 1
            continue

        action_buf.append(text)
        i += 1

    flush_action()

    if not lines and not actions:
        raise ParseError("empty script", line_number=0)

    return Script(scene_heading=heading, action_blocks=tuple(actions),
                  lines=tuple(lines), characters=tuple(characters))


def character_count(script: Script) -> int:
    """Number of distinct speaking characters."""
    return len(script.characters)


def render_script(script: Script) -> str:
    """Render a :class:`Script` back to canonical screenplay text.

    Parsing the rendered text yields an equal ``Script``: the heading
    comes first, then one paragraph per action block, then one cue block
    per dialogue line.
    """
    blocks: list[str] = []
    if script.scene_heading is not None:
        blocks.append(script.scene_heading)
    blocks.extend(script.action_blocks)
    for line in script.lines:
        parts = [line.character]
        if line.parenthetical is not None:
            parts.append(f"({line.parenthetical})")
        parts.append(line.text)
        blocks.append("\n".join(parts))
    return "\n\n".join(blocks) + "\n"
