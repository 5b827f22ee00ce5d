"""Exception types shared across the engine."""

from __future__ import annotations


class SceneDeckError(Exception):
    """Base class for all engine errors."""


class ParseError(SceneDeckError):
    """Malformed screenplay or attribute-query text.

    ``line_number`` locates errors in screenplay text (1-based, 0 for the
    whole input); ``position`` locates errors in query text (0-based
    character offset of the offending token).
    """

    def __init__(self, reason: str, *, line_number: int | None = None,
                 position: int | None = None):
        self.reason = reason
        self.line_number = line_number
        self.position = position
        locus = ""
        if line_number is not None:
            locus = f" (line {line_number})"
        elif position is not None:
            locus = f" (position {position})"
        super().__init__(f"{reason}{locus}")


class UnknownAttribute(SceneDeckError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        self.position = position
        super().__init__(f"unknown attribute {name!r}")


class ConflictingConstraint(SceneDeckError):
    def __init__(self, attr: str, detail: str = ""):
        self.attr = attr
        suffix = f": {detail}" if detail else ""
        super().__init__(f"conflicting constraints on {attr}{suffix}")


class FormatError(SceneDeckError):
    """A data file does not match the documented layout."""

    def __init__(self, file: str, line: int, reason: str):
        self.file = file
        self.line = line
        self.reason = reason
        super().__init__(f"{file}:{line}: {reason}")


class DanglingReference(SceneDeckError):
    def __init__(self, kind: str, ref_id: str):
        self.kind = kind
        self.ref_id = ref_id
        super().__init__(f"reference to unknown {kind} {ref_id!r}")


class InvariantViolation(SceneDeckError):
    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(detail)


class EmbeddingDimensionMismatch(SceneDeckError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"embedding dimension mismatch: expected {expected}, got {actual}")


class MissingEmbedding(SceneDeckError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"no embedding for {key!r}")


class SidecarUnavailable(SceneDeckError):
    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f"text embedding sidecar unavailable: {detail}")


class NoScenesFound(SceneDeckError):
    def __init__(self, detail: str = "no scenes satisfy the fixed constraints"):
        super().__init__(detail)


class InfeasibleCast(SceneDeckError):
    def __init__(self, scene_id: str):
        self.scene_id = scene_id
        super().__init__(f"no valid cast assignment in scene {scene_id!r}")


class NoFrameForCharacter(SceneDeckError):
    def __init__(self, character: str, scene_id: str):
        self.character = character
        self.scene_id = scene_id
        super().__init__(f"no recognizable frame for {character!r} in scene {scene_id!r}")
