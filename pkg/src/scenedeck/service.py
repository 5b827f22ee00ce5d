"""HTTP API over the pipeline, plus static hosting for the web UI.

Endpoints (all JSON except image bytes, CORS open):

* ``POST /api/v1/visualize``                     run the pipeline
* ``GET  /api/v1/scenes/{id}/alternatives``      swap candidates for a cast
* ``GET  /api/v1/frames/{id}/image``             stored image bytes
* ``GET  /api/v1/locations``                     the location vocabulary
* ``GET  /api/v1/health``                        load status and counts

The server is stateless: a request snapshot (catalog, annotations,
embeddings, search index) is loaded once at startup and never mutated,
so handlers can run fully concurrently.  Query and script errors map to
400 with a structured body; an empty result set is a 200 with a warning.
"""

from __future__ import annotations

import logging
import mimetypes
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse
from pydantic import BaseModel, Field

from . import annotate as annotate_mod
from . import attrql, casting, retrieval, screenplay
from .catalog import Catalog, load_catalog
from .embeddings import EmbeddingStore, load_store, make_text_fallback
from .errors import (ConflictingConstraint, NoScenesFound, ParseError,
                     SceneDeckError, UnknownAttribute)

logger = logging.getLogger("scenedeck")

DEFAULT_MAX_RESULTS = 20


@dataclass
class Snapshot:
    """Everything a request handler needs, immutable after load."""

    data_dir: Path
    catalog: Catalog
    annotations: dict[str, annotate_mod.SceneAnnotation]
    store: EmbeddingStore
    index: retrieval.SearchIndex


def build_snapshot(data_dir: str | Path, *, text_fallback: str = "hash",
                   use_cache: bool = True) -> Snapshot:
    """Load catalog, embeddings, and annotations into a request snapshot.

    Annotations come from ``catalog/annotations.jsonl`` when present (and
    ``use_cache`` is on); otherwise they are computed and the cache file
    is (re)written.
    """
    data_dir = Path(data_dir)
    catalog = load_catalog(data_dir)
    store = load_store(data_dir, text_fallback=make_text_fallback(text_fallback))

    cache_path = annotate_mod.annotations_path(data_dir)
    if use_cache and cache_path.exists():
        annotations = annotate_mod.load_annotations(data_dir)
        if set(annotations) != set(catalog.scenes):
            logger.warning("annotation cache is stale, recomputing")
            annotations = annotate_mod.annotate_catalog(catalog, store)
            annotate_mod.save_annotations(annotations, data_dir)
    else:
        annotations = annotate_mod.annotate_catalog(catalog, store)
        annotate_mod.save_annotations(annotations, data_dir)

    present: set[str] = set()
    images_root = data_dir / "images"
    if images_root.is_dir():
        import os

        for root, _dirs, files in os.walk(images_root):
            rel = Path(root).relative_to(data_dir)
            present.update(str(rel / name) for name in files)
    missing = sum(1 for frame in catalog.frames.values()
                  if frame.image_path not in present)
    if missing:
        logger.warning("%d of %d frame images are missing on disk; their "
                       "image endpoints will return 404", missing,
                       len(catalog.frames))

    index = retrieval.build_index(catalog, annotations, store)
    return Snapshot(data_dir=data_dir, catalog=catalog, annotations=annotations,
                    store=store, index=index)


class VisualizeRequest(BaseModel):
    script: str
    query: str = ""
    max_results: int = Field(default=DEFAULT_MAX_RESULTS, ge=1)


def _error_body(kind: str, detail: str, position: int | None = None) -> dict:
    return {"error_kind": kind, "position": position, "detail": detail}


def _result_to_row(snapshot: Snapshot, result: casting.VisualizationResult) -> dict:
    def image_url(frame_id: str) -> str:
        return f"/api/v1/frames/{frame_id}/image"

    scene = snapshot.catalog.scenes[result.scene_id]
    cast_names = {c.cast_id: c.name for c in scene.casts}
    return {
        "scene_id": result.scene_id,
        "movie": {"title": result.movie_title, "year": result.movie_year},
        "assignment": {
            character: {"cast_id": cast_id, "name": cast_names[cast_id]}
            for character, cast_id in result.assignment.mapping.items()
        },
        "establishing": {"frame_id": result.establishing_frame_id,
                         "image_url": image_url(result.establishing_frame_id)},
        "lines": [{"line_index": lf.line_index, "character": lf.character,
                   "frame_id": lf.frame_id, "image_url": image_url(lf.frame_id)}
                  for lf in result.line_frames],
    }


def run_visualize(snapshot: Snapshot, script_text: str, query_text: str,
                  max_results: int = DEFAULT_MAX_RESULTS) -> dict:
    """Parse inputs, run the pipeline, and shape the response body."""
    script = screenplay.parse_script(script_text)
    query = attrql.parse_query(query_text)
    warnings: list[str] = []
    try:
        results = casting.visualize(snapshot.catalog, snapshot.annotations,
                                    snapshot.store, script, query,
                                    max_results=max_results,
                                    index=snapshot.index)
    except NoScenesFound as exc:
        return {"results": [], "warnings": [str(exc)]}
    if not results:
        warnings.append("scenes matched the query but none could cast "
                        "every script character recognizably")
    return {"results": [_result_to_row(snapshot, r) for r in results],
            "warnings": warnings}


def create_app(snapshot: Snapshot | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="scenedeck", docs_url=None, redoc_url=None)
    app.state.snapshot = snapshot
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    def current() -> Snapshot | None:
        return app.state.snapshot

    @app.exception_handler(SceneDeckError)
    async def _engine_error(request: Request, exc: SceneDeckError):
        if isinstance(exc, ParseError):
            position = exc.position if exc.position is not None else exc.line_number
            return JSONResponse(status_code=400,
                                content=_error_body("ParseError", exc.reason, position))
        if isinstance(exc, UnknownAttribute):
            return JSONResponse(status_code=400,
                                content=_error_body("UnknownAttribute", str(exc),
                                                    exc.position))
        if isinstance(exc, ConflictingConstraint):
            return JSONResponse(status_code=400,
                                content=_error_body("ConflictingConstraint", str(exc)))
        logger.exception("internal error")
        return JSONResponse(status_code=500,
                            content=_error_body("InternalError", str(exc)))

    @app.get("/api/v1/health")
    async def health():
        snapshot = current()
        if snapshot is None:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ok",
                "scenes": len(snapshot.catalog.scenes),
                "frames": len(snapshot.catalog.frames),
                "embedding_dim": snapshot.store.dim}

    @app.get("/api/v1/locations")
    async def locations():
        return {"vocabulary": list(current().catalog.location_vocabulary)}

    @app.post("/api/v1/visualize")
    async def visualize(request: VisualizeRequest):
        return run_visualize(current(), request.script, request.query,
                             request.max_results)

    @app.get("/api/v1/scenes/{scene_id}/alternatives")
    async def scene_alternatives(scene_id: str, cast_id: str):
        snapshot = current()
        scene = snapshot.catalog.scenes.get(scene_id)
        if scene is None:
            return JSONResponse(status_code=404,
                                content=_error_body("NotFound",
                                                    f"unknown scene {scene_id!r}"))
        if all(c.cast_id != cast_id for c in scene.casts):
            return JSONResponse(status_code=404,
                                content=_error_body("NotFound",
                                                    f"unknown cast {cast_id!r}"))
        annotation = snapshot.annotations[scene_id]
        frame_ids = list(annotation.recognizable_frames.get(cast_id, ()))
        return {"frame_ids": frame_ids,
                "image_urls": [f"/api/v1/frames/{fid}/image" for fid in frame_ids]}

    @app.get("/api/v1/frames/{frame_id}/image")
    async def frame_image(frame_id: str):
        snapshot = current()
        frame = snapshot.catalog.frames.get(frame_id)
        if frame is None:
            return JSONResponse(status_code=404,
                                content=_error_body("NotFound",
                                                    f"unknown frame {frame_id!r}"))
        path = snapshot.data_dir / frame.image_path
        if not path.exists():
            return JSONResponse(status_code=404,
                                content=_error_body("NotFound",
                                                    f"image missing for {frame_id!r}"))
        media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        return FileResponse(path, media_type=media_type,
                            headers={"Cache-Control": "public, max-age=31536000, immutable"})

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        async def root():
            return ("<!doctype html><title>scenedeck</title>"
                    "<p>API is up. Build the web UI and pass --ui-dir to serve it.</p>")

    return app
