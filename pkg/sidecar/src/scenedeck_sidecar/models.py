"""Embedding model registry.

The sidecar treats the model as a pluggable pair of functions (images ->
vectors, texts -> vectors) at a fixed dimension.  The built-in
``pixel-grid`` model needs no weights: images are resized onto a small
RGB grid and the flattened pixel values become the feature vector; text
is hashed into a seeded counter-based Gaussian draw.  Both sides are
deterministic, so re-running extraction is byte-stable.

Every vector is L2-normalized in float64 before the float32 cast, which
keeps norms within the engine's ingestion tolerance.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from PIL import Image


def _normalize(matrix: np.ndarray) -> np.ndarray:
    matrix = matrix.astype(np.float64)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return (matrix / norms).astype(np.float32)


def _hash_text_rows(texts: list[str], dim: int) -> np.ndarray:
    rows = np.empty((len(texts), dim), dtype=np.float64)
    for i, text in enumerate(texts):
        key = " ".join(text.split()).lower().encode("utf-8")
        seed = int.from_bytes(hashlib.sha256(key).digest()[:8], "big")
        rng = np.random.Generator(np.random.Philox(key=seed))
        rows[i] = rng.standard_normal(dim)
    return _normalize(rows)


def _pixel_grid_rows(paths: list[str], dim: int) -> np.ndarray:
    side = max(1, math.isqrt(max(0, dim - 1) // 3) + 1)
    rows = np.empty((len(paths), dim), dtype=np.float64)
    for i, path in enumerate(paths):
        with Image.open(path) as img:
            small = img.convert("RGB").resize((side, side), Image.BILINEAR)
        feats = np.asarray(small, dtype=np.float64).reshape(-1) / 255.0
        if feats.size < dim:
            reps = -(-dim // feats.size)
            feats = np.tile(feats, reps)
        row = feats[:dim]
        if not row.any():
            row = row.copy()
            row[0] = 1.0
        rows[i] = row
    return _normalize(rows)


@dataclass(frozen=True)
class EmbeddingModel:
    name: str
    embed_images: Callable[[list[str], int], np.ndarray]
    embed_texts: Callable[[list[str], int], np.ndarray]


_REGISTRY = {
    "pixel-grid": EmbeddingModel(name="pixel-grid",
                                 embed_images=_pixel_grid_rows,
                                 embed_texts=_hash_text_rows),
}


def get_model(name: str) -> EmbeddingModel:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; available: "
                         f"{sorted(_REGISTRY)}") from None
