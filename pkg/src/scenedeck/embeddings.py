"""Unit embeddings for frames and free text, plus cosine similarity.

On disk a store is a pair of files under ``embeddings/``:

* ``manifest.json`` -- ``{"dim": D, "dtype": "f32", "byte_order":
  "little-endian", "frames": [{"frame_id", "row"}, ...], "texts":
  [{"text", "row"}, ...]}`` (extra informational keys are tolerated);
* ``vectors.bin`` -- row-major raw little-endian float32, row length D.

All stored vectors are unit-normalized, so cosine similarity is a plain
dot product.  Text lookups are keyed by normalized text (trimmed,
lowercased, inner whitespace collapsed); cache misses go to the
configured fallback provider:

* ``hash``    -- deterministic pseudo-embedding: seed a Philox
  (counter-based) generator with the first 8 bytes of the SHA-256 of the
  normalized text, draw ``dim`` standard normals, unit-normalize.  The
  same text yields bit-identical vectors on any platform.
* ``sidecar`` -- HTTP POST ``{url}/embed/text`` with ``{"texts": [...]}``,
  expecting ``{"dim": D, "vectors": [[...], ...]}``.
* ``none``    -- uncached text raises :class:`MissingEmbedding`.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

import numpy as np

from .errors import (EmbeddingDimensionMismatch, FormatError, InvariantViolation,
                     MissingEmbedding, SidecarUnavailable)

# Ingested rows must already be unit vectors; float32 rounding of a
# normalized vector stays well inside this.
NORM_TOLERANCE = 1e-5


def normalize_text(text: str) -> str:
    """Canonical text key: trim, lowercase, collapse inner whitespace."""
    return " ".join(text.split()).lower()


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two unit vectors (a clamped dot product)."""
    if a.shape != b.shape:
        raise EmbeddingDimensionMismatch(a.shape[-1], b.shape[-1])
    value = float(np.dot(a.astype(np.float64), b.astype(np.float64)))
    return max(-1.0, min(1.0, value))


def hash_text_vector(text: str, dim: int) -> np.ndarray:
    """The deterministic hash-provider embedding for ``text``."""
    digest = hashlib.sha256(normalize_text(text).encode("utf-8")).digest()
    seed = int.from_bytes(digest[:8], "big")
    rng = np.random.Generator(np.random.Philox(key=seed))
    v = rng.standard_normal(dim)
    return (v / np.linalg.norm(v)).astype(np.float32)


class HashTextProvider:
    """Stable pseudo-embeddings derived from the text itself."""

    name = "hash"

    def __call__(self, text: str, dim: int) -> np.ndarray:
        return hash_text_vector(text, dim)


class SidecarTextProvider:
    """Fetches text embeddings from the sidecar wire protocol."""

    name = "sidecar"

    def __init__(self, url: str, timeout: float = 10.0):
        self.url = url.rstrip("/")
        self.timeout = timeout

    def __call__(self, text: str, dim: int) -> np.ndarray:
        import requests

        try:
            response = requests.post(f"{self.url}/embed/text",
                                     json={"texts": [text]},
                                     timeout=self.timeout)
        except requests.RequestException as exc:
            raise SidecarUnavailable(str(exc)) from exc
        if response.status_code != 200:
            raise SidecarUnavailable(f"HTTP {response.status_code}")
        try:
            body = response.json()
            got_dim = int(body["dim"])
            vector = np.asarray(body["vectors"][0], dtype=np.float32)
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise SidecarUnavailable(f"malformed response: {exc}") from exc
        if got_dim != dim or vector.shape != (dim,):
            raise EmbeddingDimensionMismatch(dim, got_dim)
        norm = float(np.linalg.norm(vector.astype(np.float64)))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise InvariantViolation(f"sidecar vector norm {norm} is not unit")
        return vector


class EmbeddingStore:
    """Fixed-dimension unit vectors keyed by frame id or normalized text."""

    def __init__(self, dim: int, matrix: np.ndarray, frame_rows: dict[str, int],
                 text_rows: dict[str, int], text_fallback=None):
        self.dim = dim
        self._matrix = matrix
        self._frame_rows = frame_rows
        self._text_rows = text_rows
        self._text_cache: dict[str, np.ndarray] = {}
        self._cache_lock = threading.Lock()
        self.text_fallback = text_fallback

    @classmethod
    def from_vectors(cls, dim: int, frame_vectors: dict[str, np.ndarray],
                     text_vectors: dict[str, np.ndarray] | None = None,
                     text_fallback=None) -> "EmbeddingStore":
        text_vectors = text_vectors or {}
        rows = []
        frame_rows = {}
        text_rows = {}
        for frame_id, vec in frame_vectors.items():
            frame_rows[frame_id] = len(rows)
            rows.append(np.asarray(vec, dtype=np.float32))
        for text, vec in text_vectors.items():
            text_rows[normalize_text(text)] = len(rows)
            rows.append(np.asarray(vec, dtype=np.float32))
        matrix = (np.stack(rows) if rows
                  else np.zeros((0, dim), dtype=np.float32))
        if matrix.shape[1:] != (dim,) and len(rows):
            raise EmbeddingDimensionMismatch(dim, matrix.shape[-1])
        return cls(dim, matrix, frame_rows, text_rows, text_fallback)

    @property
    def frame_ids(self):
        return self._frame_rows.keys()

    def has_frame(self, frame_id: str) -> bool:
        return frame_id in self._frame_rows

    def frame_row(self, frame_id: str) -> int:
        row = self._frame_rows.get(frame_id)
        if row is None:
            raise MissingEmbedding(frame_id)
        return row

    def frame_matrix(self, frame_ids: list[str]) -> np.ndarray:
        """Gathered rows for many frames, in the given order."""
        idx = [self.frame_row(fid) for fid in frame_ids]
        return self._matrix[idx]

    def frame_embedding(self, frame_id: str) -> np.ndarray:
        return self._matrix[self.frame_row(frame_id)]

    def text_embedding(self, text: str) -> np.ndarray:
        key = normalize_text(text)
        if not key:
            raise ValueError("text must be non-empty")
        row = self._text_rows.get(key)
        if row is not None:
            return self._matrix[row]
        cached = self._text_cache.get(key)
        if cached is not None:
            return cached
        if self.text_fallback is None:
            raise MissingEmbedding(key)
        with self._cache_lock:
            cached = self._text_cache.get(key)
            if cached is None:
                cached = self.text_fallback(key, self.dim)
                self._text_cache[key] = cached
        return cached


def frame_embedding(store: EmbeddingStore, frame_id: str) -> np.ndarray:
    return store.frame_embedding(frame_id)


def text_embedding(store: EmbeddingStore, text: str) -> np.ndarray:
    return store.text_embedding(text)


def write_store(data_dir: str | Path, dim: int,
                frame_vectors: dict[str, np.ndarray],
                text_vectors: dict[str, np.ndarray] | None = None,
                extra_manifest: dict | None = None) -> None:
    """Write ``embeddings/manifest.json`` and ``vectors.bin``."""
    emb_dir = Path(data_dir) / "embeddings"
    emb_dir.mkdir(parents=True, exist_ok=True)
    text_vectors = text_vectors or {}

    manifest = {"dim": dim, "dtype": "f32", "byte_order": "little-endian",
                "frames": [], "texts": []}
    if extra_manifest:
        manifest.update(extra_manifest)
    rows = []
    for frame_id, vec in frame_vectors.items():
        manifest["frames"].append({"frame_id": frame_id, "row": len(rows)})
        rows.append(np.asarray(vec, dtype=np.float32))
    for text, vec in text_vectors.items():
        manifest["texts"].append({"text": normalize_text(text), "row": len(rows)})
        rows.append(np.asarray(vec, dtype=np.float32))

    matrix = np.stack(rows) if rows else np.zeros((0, dim), dtype=np.float32)
    if rows and matrix.shape[1] != dim:
        raise EmbeddingDimensionMismatch(dim, matrix.shape[1])
    (emb_dir / "vectors.bin").write_bytes(matrix.astype("<f4").tobytes())
    (emb_dir / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, separators=(",", ":")) + "\n",
        encoding="utf-8")


def load_store(data_dir: str | Path, text_fallback=None) -> EmbeddingStore:
    """Load a store, validating dimensions and unit norms."""
    emb_dir = Path(data_dir) / "embeddings"
    manifest_path = emb_dir / "manifest.json"
    vectors_path = emb_dir / "vectors.bin"
    if not manifest_path.exists():
        raise FormatError("manifest.json", 0, "file missing")
    if not vectors_path.exists():
        raise FormatError("vectors.bin", 0, "file missing")

    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError("manifest.json", 0, f"invalid JSON: {exc.msg}") from exc
    for key in ("dim", "dtype", "byte_order", "frames", "texts"):
        if key not in manifest:
            raise FormatError("manifest.json", 0, f"missing key {key!r}")
    dim = manifest["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise FormatError("manifest.json", 0, "dim must be a positive integer")
    if manifest["dtype"] != "f32":
        raise FormatError("manifest.json", 0, "only dtype 'f32' is supported")
    if manifest["byte_order"] != "little-endian":
        raise FormatError("manifest.json", 0, "only little-endian data is supported")

    raw = vectors_path.read_bytes()
    if len(raw) % (4 * dim) != 0:
        raise FormatError("vectors.bin", 0,
                          f"byte length {len(raw)} is not a multiple of dim {dim} rows")
    matrix = np.frombuffer(raw, dtype="<f4").reshape(-1, dim)
    n_rows = matrix.shape[0]

    frame_rows: dict[str, int] = {}
    for entry in manifest["frames"]:
        frame_id, row = entry["frame_id"], entry["row"]
        if not isinstance(row, int) or not 0 <= row < n_rows:
            raise FormatError("manifest.json", 0,
                              f"frame {frame_id!r} row {row} out of range")
        frame_rows[frame_id] = row
    text_rows: dict[str, int] = {}
    for entry in manifest["texts"]:
        text, row = entry["text"], entry["row"]
        if not isinstance(row, int) or not 0 <= row < n_rows:
            raise FormatError("manifest.json", 0,
                              f"text {text!r} row {row} out of range")
        text_rows[normalize_text(text)] = row

    if n_rows:
        norms = np.linalg.norm(matrix.astype(np.float64), axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > NORM_TOLERANCE:
            raise InvariantViolation(
                f"vectors.bin contains non-unit rows (max deviation {worst:.2e})")

    return EmbeddingStore(dim, np.ascontiguousarray(matrix), frame_rows,
                          text_rows, text_fallback)


def make_text_fallback(spec: str):
    """Build a provider from a config string: hash | none | sidecar:URL."""
    if spec == "hash":
        return HashTextProvider()
    if spec == "none":
        return None
    if spec.startswith("sidecar:"):
        return SidecarTextProvider(spec.split(":", 1)[1])
    raise ValueError(f"unknown text fallback {spec!r}")
