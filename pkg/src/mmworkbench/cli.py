"""Command-line entry points: serve the API, run headless, validate inputs."""

from __future__ import annotations

import json
import math
import sys
import tempfile
from pathlib import Path

import click

from .audio import read_audio
from .errors import MediaFormatError, ValidationFailure
from .store import SessionStore
from .timeline import load_transcript, validate_transcript
from .video import read_video


@click.group()
def main():
    """Multimodal sentiment robustness workbench."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--data-dir", default="workbench-data", show_default=True,
              type=click.Path(file_okay=False))
def serve(host: str, port: int, data_dir: str):
    """Start the HTTP service."""
    import uvicorn

    from .api import create_app
    uvicorn.run(create_app(data_dir), host=host, port=port)


@main.command()
@click.option("--audio", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--video", required=True, type=click.Path(exists=True))
@click.option("--transcript", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--recipe", type=click.Path(exists=True, dir_okay=False),
              help="noise recipe JSON; omit to analyze the original only")
@click.option("--defense", type=click.Path(exists=True, dir_okay=False),
              help="defense config JSON; requires --recipe")
@click.option("--out", required=True, type=click.Path(file_okay=False))
def run(audio, video, transcript, recipe, defense, out):
    """Run the full pipeline headless and write the export archive."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        with tempfile.TemporaryDirectory(prefix="workbench-run-") as tmp:
            store = SessionStore(tmp)
            session = store.create_session(audio, video, transcript)
            if recipe:
                body = json.loads(Path(recipe).read_text(encoding="utf-8"))
                store.apply_recipe(session.id, body)
            if defense:
                body = json.loads(Path(defense).read_text(encoding="utf-8"))
                store.apply_defense(session.id, body)
            archive = out_dir / "export.zip"
            archive.write_bytes(store.export_session(session.id))
            for name, variant in session.variants.items():
                p = variant.prediction
                click.echo(f"{name}: {p.label} (fused {p.fused:+.4f})")
            for warning in session.warnings:
                click.echo(f"warning: {warning}", err=True)
            click.echo(f"wrote {archive}")
    except (ValidationFailure, MediaFormatError) as exc:
        _fail(exc)


@main.command()
@click.option("--transcript", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--audio", type=click.Path(exists=True, dir_okay=False))
@click.option("--video", type=click.Path(exists=True))
def validate(transcript, audio, video):
    """Check a transcript (and optionally its media) without running anything."""
    try:
        t = load_transcript(transcript)
        audio_ms = read_audio(audio).duration_ms if audio else math.inf
        video_ms = read_video(video).duration_ms if video else math.inf
        violations = validate_transcript(t, audio_ms, video_ms)
    except (ValidationFailure, MediaFormatError) as exc:
        _fail(exc)
    if violations:
        for v in violations:
            click.echo(f"{v.rule}: {v.message}", err=True)
        sys.exit(1)
    click.echo(f"transcript OK ({len(t)} words)")


@main.command()
@click.option("--out", required=True, type=click.Path(file_okay=False))
def demo(out):
    """Write the bundled demo clip plus example recipe/defense files."""
    from .demo import write_demo_clip
    paths = write_demo_clip(Path(out))
    for p in paths:
        click.echo(f"wrote {p}")


def _fail(exc) -> None:
    if isinstance(exc, ValidationFailure):
        for v in exc.violations:
            click.echo(f"{v.rule}: {v.message}", err=True)
    else:
        click.echo(str(exc), err=True)
    sys.exit(1)


if __name__ == "__main__":
    main()
