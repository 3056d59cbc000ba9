"""Command-line front end: encode -> evaluate -> {stats, similarity, report}.

Every flag can also be set through an environment variable with the
``BRAINENC_`` prefix (click's auto-envvar naming, e.g.
``BRAINENC_ENCODE_LAMBDA`` for ``brainenc encode --lambda``).

Exit codes: 0 success, 1 validation error, 2 numeric failure, 3 missing
upstream stage output.
"""

from __future__ import annotations

import sys

import click

from . import __version__
from .errors import BrainencError
from .manifest import load_manifest
from .pipeline import (
    cmd_encode,
    cmd_evaluate,
    cmd_report,
    cmd_similarity,
    cmd_stats,
    resolve_plan,
)
from .taskonomy import LINKAGES, SIMILARITY_MODES


def _split(values):
    out = []
    for v in values or ():
        out.extend(p for p in v.split(",") if p)
    return out or None


def _plan(manifest_path, out, tasks, subjects, rois, **overrides):
    manifest = load_manifest(manifest_path)
    return resolve_plan(
        manifest,
        out,
        tasks=_split(tasks),
        subjects=_split(subjects),
        rois=_split(rois),
        **overrides,
    )


def _common(fn):
    fn = click.option("--manifest", required=True, type=click.Path(), help="experiment manifest JSON")(fn)
    fn = click.option("--tasks", multiple=True, help="task code filter (repeat or comma-separate)")(fn)
    fn = click.option("--subjects", multiple=True, help="subject id filter")(fn)
    fn = click.option("--rois", multiple=True, help="ROI name filter")(fn)
    fn = click.option("--out", required=True, type=click.Path(), help="output directory")(fn)
    return fn


@click.group()
@click.version_option(__version__, prog_name="brainenc")
def cli():
    """Voxelwise brain-encoding evaluation pipeline."""


@cli.command("encode")
@_common
@click.option("--lambda", "lam", type=float, default=None, help="ridge penalty (default 1.0)")
@click.option("--folds", "k_folds", type=int, default=None, help="cross-validation folds (default 10)")
@click.option("--fold-scheme", type=click.Choice(["contiguous", "shuffled"]), default=None)
@click.option("--standardize", type=click.Choice(["zscore", "none"]), default=None)
@click.option("--seed", type=int, default=None, help="seed for the shuffled fold scheme")
@click.option("--threads", type=int, default=1, show_default=True, help="parallel task workers")
@click.option("--save-weights", is_flag=True, help="persist per-fold weight matrices")
def encode(manifest, tasks, subjects, rois, out, lam, k_folds, fold_scheme, standardize, seed, threads, save_weights):
    """Fit cross-validated ridge encoders for every selected (task, subject, ROI)."""
    plan = _plan(
        manifest, out, tasks, subjects, rois,
        lam=lam, k_folds=k_folds, fold_scheme=fold_scheme, standardize=standardize, seed=seed,
    )
    n = cmd_encode(plan, threads=threads, save_weights=save_weights,
                   log=lambda msg: click.echo(msg, err=True))
    click.echo(f"encoded {n} runs into {plan.output_dir / 'runs'}")


@cli.command("evaluate")
@_common
@click.option("--pc-mode", type=click.Choice(["per-sample", "per-voxel"]), default=None,
              help="Pearson averaging mode (default per-sample)")
def evaluate(manifest, tasks, subjects, rois, out, pc_mode):
    """Score encoded runs: 2V2, Pearson and MAE plus per-voxel score vectors."""
    plan = _plan(manifest, out, tasks, subjects, rois, pc_mode=pc_mode)
    path = cmd_evaluate(plan, log=lambda msg: click.echo(msg, err=True))
    click.echo(f"wrote {path}")


@cli.command("stats")
@_common
@click.option("--metric", type=click.Choice(["pearson", "2v2", "mae"]), default="pearson",
              show_default=True, help="metric fed into the ANOVA")
@click.option("--correction-family", type=int, default=None,
              help="Bonferroni family size (default: number of pairs tested)")
@click.option("--include-base", is_flag=True, help="include BASE in the task groups")
def stats(manifest, tasks, subjects, rois, out, metric, correction_family, include_base):
    """Per-ROI one-way ANOVA across tasks and pairwise Bonferroni tables."""
    plan = _plan(manifest, out, tasks, subjects, rois)
    path = cmd_stats(plan, metric=metric, correction_family=correction_family,
                     include_base=include_base)
    click.echo(f"wrote {path}")


@cli.command("similarity")
@_common
@click.option("--similarity-mode", type=click.Choice(list(SIMILARITY_MODES)),
              default="prediction-score", show_default=True)
@click.option("--linkage", type=click.Choice(list(LINKAGES)), default="average", show_default=True)
def similarity(manifest, tasks, subjects, rois, out, similarity_mode, linkage):
    """Task-similarity heatmap and hierarchical-clustering dendrogram."""
    plan = _plan(manifest, out, tasks, subjects, rois)
    path = cmd_similarity(plan, mode=similarity_mode, linkage=linkage)
    click.echo(f"wrote {path}")


@cli.command("report")
@_common
def report(manifest, tasks, subjects, rois, out):
    """Bar-chart SVGs of mean 2V2/Pearson per ROI per task."""
    plan = _plan(manifest, out, tasks, subjects, rois)
    path = cmd_report(plan)
    click.echo(f"wrote {path}")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False, auto_envvar_prefix="BRAINENC")
        return 0
    except BrainencError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(main())
