"""Command line interface.

Configuration precedence for the server: CLI flag, then environment
variable (SCENEDECK_DATA_DIR, SCENEDECK_PORT, SCENEDECK_TEXT_FALLBACK),
then built-in default.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .errors import ParseError, SceneDeckError, UnknownAttribute

EXIT_USAGE = 2


def _fail(message: str, code: int = 1) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Script-to-visualization retrieval engine."""


@main.command()
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--from-movienet", "movienet_dir", type=click.Path(exists=True),
              default=None, help="Convert a MovieNet-style dump first.")
def ingest(data_dir, movienet_dir):
    """Validate a data directory (optionally converting into it first)."""
    from .catalog import load_catalog

    try:
        if movienet_dir:
            from .movienet import convert_movienet

            convert_movienet(movienet_dir, data_dir)
            click.echo(f"converted {movienet_dir} -> {data_dir}")
        catalog = load_catalog(data_dir)
    except SceneDeckError as exc:
        _fail(str(exc))
    movies, scenes, shots, frames = catalog.counts()
    click.echo(f"ok: {movies} movies, {scenes} scenes, {shots} shots, "
               f"{frames} frames, {len(catalog.location_vocabulary)} location tags")


@main.command()
@click.option("--data-dir", required=True, type=click.Path(exists=True))
@click.option("--no-cache", is_flag=True, help="Recompute even if a cache exists.")
@click.option("--text-fallback", default="hash", show_default=True)
def annotate(data_dir, no_cache, text_fallback):
    """Compute (or refresh) recognizability annotations."""
    from . import annotate as annotate_mod
    from .catalog import load_catalog
    from .embeddings import load_store, make_text_fallback

    try:
        catalog = load_catalog(data_dir)
        store = load_store(data_dir, text_fallback=make_text_fallback(text_fallback))
        cache = annotate_mod.annotations_path(data_dir)
        if cache.exists() and not no_cache:
            annotations = annotate_mod.load_annotations(data_dir)
            click.echo(f"cache is current: {len(annotations)} scenes")
            return
        annotations = annotate_mod.annotate_catalog(catalog, store)
        annotate_mod.save_annotations(annotations, data_dir)
    except SceneDeckError as exc:
        _fail(str(exc))
    click.echo(f"annotated {len(annotations)} scenes -> {cache}")


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", required=True, type=int)
@click.option("--movies", "n_movies", default=2, show_default=True, type=int)
@click.option("--scenes", "scenes_per_movie", default=3, show_default=True, type=int)
@click.option("--shots", "shots_per_scene", default=3, show_default=True, type=int)
@click.option("--frames", "frames_per_shot", default=3, show_default=True, type=int)
@click.option("--casts", "casts_per_scene", default=3, show_default=True, type=int)
@click.option("--locations", "location_vocab_size", default=90, show_default=True,
              type=int)
@click.option("--dim", "embedding_dim", default=512, show_default=True, type=int)
@click.option("--sigma", "noise_sigma", default=0.25, show_default=True, type=float)
@click.option("--images/--no-images", "write_images", default=True, show_default=True)
def synth(out_dir, **kwargs):
    """Generate a deterministic synthetic data directory."""
    from .synth import SynthSpec, generate_synthetic

    try:
        spec = SynthSpec(**kwargs)
    except ValueError as exc:
        _fail(str(exc), EXIT_USAGE)
    result = generate_synthetic(spec, out_dir)
    movies, scenes, shots, frames = result.catalog.counts()
    click.echo(f"wrote {out_dir}: {movies} movies, {scenes} scenes, "
               f"{shots} shots, {frames} frames, dim {result.dim}")


@main.command()
@click.option("--data-dir", default=None, type=click.Path())
@click.option("--port", default=None, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--text-fallback", default=None,
              help="hash | none | sidecar:URL  [default: hash]")
@click.option("--ui-dir", default=None, type=click.Path(),
              help="Directory of built UI assets to serve at /.")
@click.option("--no-cache", is_flag=True, help="Recompute annotations on startup.")
def serve(data_dir, port, host, text_fallback, ui_dir, no_cache):
    """Load a data directory and serve the HTTP API."""
    import uvicorn

    from .service import build_snapshot, create_app

    data_dir = data_dir or os.environ.get("SCENEDECK_DATA_DIR")
    if not data_dir:
        _fail("--data-dir or SCENEDECK_DATA_DIR is required", EXIT_USAGE)
    port = port if port is not None else int(os.environ.get("SCENEDECK_PORT", "8000"))
    text_fallback = text_fallback or os.environ.get("SCENEDECK_TEXT_FALLBACK", "hash")

    try:
        snapshot = build_snapshot(data_dir, text_fallback=text_fallback,
                                  use_cache=not no_cache)
    except SceneDeckError as exc:
        _fail(str(exc))
    app = create_app(snapshot, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--data-dir", required=True, type=click.Path(exists=True))
@click.option("--script", "script_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--attrs", default="", help="Attribute query text.")
@click.option("--max-results", default=20, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--text-fallback", default="hash", show_default=True)
def query(data_dir, script_path, attrs, max_results, out_path, text_fallback):
    """Run one visualization request and write the response as JSON."""
    from .service import build_snapshot, run_visualize

    script_text = Path(script_path).read_text(encoding="utf-8")
    try:
        snapshot = build_snapshot(data_dir, text_fallback=text_fallback)
        body = run_visualize(snapshot, script_text, attrs, max_results=max_results)
    except ParseError as exc:
        where = exc.position if exc.position is not None else exc.line_number
        _fail(f"{exc.reason} (at {where})", EXIT_USAGE)
    except UnknownAttribute as exc:
        _fail(str(exc), EXIT_USAGE)
    except SceneDeckError as exc:
        _fail(str(exc))
    Path(out_path).write_text(json.dumps(body, ensure_ascii=False, indent=2) + "\n",
                              encoding="utf-8")
    click.echo(f"wrote {out_path}: {len(body['results'])} rows")


if __name__ == "__main__":
    main()
