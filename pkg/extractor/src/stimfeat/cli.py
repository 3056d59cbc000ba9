"""Command-line extraction: text in, interchange features + fragment out."""

from __future__ import annotations

import math
import sys
from pathlib import Path

import click

from .embed import embed_sentences, embed_trs, load_encoder
from .emit import emit
from .errors import StimfeatError
from .registry import DEFAULT_REGISTRY, TASK_CODES
from .transcript import load_transcript


@click.command("extract")
@click.option("--task", required=True, type=click.Choice(list(TASK_CODES)))
@click.option("--stimuli", required=True, type=click.Path(exists=True),
              help="sentences: text file, one per line; narrative: JSON-lines transcript")
@click.option("--mode", required=True, type=click.Choice(["sentences", "narrative"]))
@click.option("--checkpoint", default=None,
              help="hub ref or local model dir (default: the task's registry entry)")
@click.option("--tr", type=float, default=1.5, show_default=True,
              help="repetition time in seconds (narrative mode)")
@click.option("--trs", type=int, default=None,
              help="number of TR rows (narrative mode; default: covers the last offset)")
@click.option("--window", type=int, default=10, show_default=True)
@click.option("--overlap", type=int, default=2, show_default=True)
@click.option("--empty-mode", type=click.Choice(["zero", "carry-forward"]),
              default="zero", show_default=True)
@click.option("--device", default="cpu", show_default=True)
@click.option("--out", required=True, type=click.Path())
def extract(task, stimuli, mode, checkpoint, tr, trs, window, overlap, empty_mode, device, out):
    """Extract one task's feature matrix from a checkpoint."""
    ref = checkpoint or DEFAULT_REGISTRY.checkpoint_ref(task)
    encoder = load_encoder(ref, device=device)
    settings = {"checkpoint": ref, "mode": mode, "stack": encoder.stack}
    if mode == "sentences":
        sentences = [
            line for line in Path(stimuli).read_text("utf-8").split("\n") if line.strip()
        ]
        features = embed_sentences(sentences, encoder)
        settings["n_sentences"] = len(sentences)
    else:
        transcript = load_transcript(stimuli, tr_seconds=tr)
        n_trs = trs if trs is not None else math.ceil(transcript.words[-1].offset / tr)
        features, empty = embed_trs(
            transcript, n_trs, encoder, window=window, overlap=overlap, empty_mode=empty_mode
        )
        settings.update({
            "tr_seconds": tr,
            "window": window,
            "overlap": overlap,
            "overlap_rule": "earliest window",
            "empty_mode": empty_mode,
            "empty_trs": [int(i) for i in empty.nonzero()[0]],
        })
    npy_path, fragment_path = emit(features, task, out, settings)
    click.echo(f"wrote {npy_path} ({features.shape[0]} x {features.shape[1]}) and {fragment_path}")


def main(argv=None):
    try:
        extract.main(args=argv, standalone_mode=False, auto_envvar_prefix="STIMFEAT")
        return 0
    except StimfeatError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(main())
