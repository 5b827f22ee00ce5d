"""Batch extraction: catalog frames -> embeddings/manifest.json + vectors.bin.

Output matches the engine's store format exactly: row-major little-endian
float32, one manifest row per frames.jsonl line, in file order.  The model
identifier is recorded in the manifest as an informational field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .models import get_model


@dataclass
class ExtractionJob:
    data_dir: Path
    model: str = "pixel-grid"
    dim: int = 512
    batch_size: int = 64
    out_dir: Path | None = None

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        self.out_dir = Path(self.out_dir) if self.out_dir else self.data_dir
        if self.dim < 1 or self.batch_size < 1:
            raise ValueError("dim and batch_size must be positive")


def _read_frames(data_dir: Path) -> list[tuple[str, str]]:
    frames_path = data_dir / "catalog" / "frames.jsonl"
    out = []
    with frames_path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            raw = raw.strip()
            if not raw:
                continue
            obj = json.loads(raw)
            try:
                out.append((obj["frame_id"], obj["image_path"]))
            except KeyError as exc:
                raise ValueError(f"frames.jsonl:{lineno}: missing {exc}") from exc
    return out


def extract(job: ExtractionJob) -> int:
    """Embed every catalog frame image; returns the number of rows written."""
    model = get_model(job.model)
    frames = _read_frames(job.data_dir)

    chunks = []
    for start in range(0, len(frames), job.batch_size):
        batch = frames[start:start + job.batch_size]
        paths = [str(job.data_dir / image_path) for _, image_path in batch]
        rows = model.embed_images(paths, job.dim)
        if rows.shape != (len(batch), job.dim):
            raise ValueError(f"model returned shape {rows.shape}")
        chunks.append(rows.astype("<f4"))

    matrix = np.concatenate(chunks) if chunks \
        else np.zeros((0, job.dim), dtype="<f4")
    manifest = {
        "dim": job.dim,
        "dtype": "f32",
        "byte_order": "little-endian",
        "frames": [{"frame_id": fid, "row": i} for i, (fid, _) in enumerate(frames)],
        "texts": [],
        "model": model.name,
    }

    emb_dir = job.out_dir / "embeddings"
    emb_dir.mkdir(parents=True, exist_ok=True)
    (emb_dir / "vectors.bin").write_bytes(matrix.tobytes())
    (emb_dir / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, separators=(",", ":")) + "\n",
        encoding="utf-8")
    return len(frames)
