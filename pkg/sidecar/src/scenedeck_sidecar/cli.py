"""Command line interface for the embedding sidecar."""

from __future__ import annotations

import sys

import click


@click.group()
def main():
    """Embedding producer for scenedeck catalogs."""


@main.command()
@click.option("--data-dir", required=True, type=click.Path(exists=True))
@click.option("--model", default="pixel-grid", show_default=True)
@click.option("--dim", default=512, show_default=True, type=int)
@click.option("--batch", "batch_size", default=64, show_default=True, type=int)
@click.option("--out", "out_dir", default=None, type=click.Path(),
              help="Output directory [default: the data directory].")
def extract(data_dir, model, dim, batch_size, out_dir):
    """Embed every catalog frame image into embeddings/."""
    from .extract import ExtractionJob, extract as run

    try:
        job = ExtractionJob(data_dir=data_dir, model=model, dim=dim,
                            batch_size=batch_size, out_dir=out_dir)
        count = run(job)
    except (ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"embedded {count} frames at dim {dim} with {model}")


@main.command("serve-text")
@click.option("--port", default=8600, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--model", default="pixel-grid", show_default=True)
@click.option("--dim", default=512, show_default=True, type=int)
def serve_text(port, host, model, dim):
    """Serve POST /embed/text."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(model, dim), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
