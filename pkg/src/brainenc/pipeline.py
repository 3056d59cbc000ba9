"""Batch orchestration over a manifest: encode, evaluate, stats, similarity, report.

Stages persist their outputs under a shared output directory and are rerun
independently; every artifact gets a JSON sidecar with the settings and the
SHA-256 digests of its inputs so results remain auditable. All outputs are
byte-deterministic: reruns with unchanged inputs rewrite identical files,
whatever the worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from . import io as bio
from .brainmap import export_voxel_scores, roi_summary_csv, voxel_table_csv
from .encoder import (
    FoldwiseRidge,
    EncodingRun,
    assign_folds,
    load_run_predictions,
    load_run_sidecar,
    save_run,
    sha256_file,
)
from .errors import FilterEmpty, IoError, MissingUpstream, BrainencError
from .manifest import Manifest
from .metrics import MetricReport, compute_report
from .stats import anova_csv_rows, one_way_anova, pairwise_csv_rows, pairwise_posthoc
from .svg import grouped_bars_svg
from .taskonomy import (
    TaskSimilarity,
    cluster,
    export_dendrogram,
    export_heatmap,
    prediction_similarity,
    representation_similarity,
)
from .types import EncodingConfig, TASK_CODES, validate_pairing

_TOOL = f"brainenc {__version__}"


@dataclass(frozen=True)
class RunPlan:
    """A resolved selection of (tasks, subjects, ROIs) plus run settings."""

    manifest: Manifest
    tasks: tuple[str, ...]
    subjects: tuple[str, ...]
    rois: tuple[str, ...]
    config: EncodingConfig
    output_dir: Path


def _filter(available: Sequence[str], wanted: Optional[Sequence[str]], what: str) -> tuple[str, ...]:
    if not wanted:
        return tuple(available)
    unknown = [w for w in wanted if w not in available]
    if unknown:
        raise FilterEmpty(f"unknown {what} filter entries {unknown}; available: {list(available)}")
    selected = tuple(a for a in available if a in set(wanted))
    if not selected:
        raise FilterEmpty(f"{what} filter matched nothing")
    return selected


def resolve_plan(
    manifest: Manifest,
    output_dir,
    tasks: Optional[Sequence[str]] = None,
    subjects: Optional[Sequence[str]] = None,
    rois: Optional[Sequence[str]] = None,
    **config_overrides,
) -> RunPlan:
    """Apply selection filters and config overrides on top of manifest defaults."""
    task_codes = sorted(manifest.task_codes(), key=TASK_CODES.index)
    subject_ids = [s.subject_id for s in manifest.subjects]
    roi_names: list[str] = []
    for s in manifest.subjects:
        for r in s.rois:
            if r.roi.name not in roi_names:
                roi_names.append(r.roi.name)
    config = manifest.defaults
    overrides = {k: v for k, v in config_overrides.items() if v is not None}
    if overrides:
        config = replace(config, **overrides)
    return RunPlan(
        manifest=manifest,
        tasks=_filter(task_codes, tasks, "task"),
        subjects=_filter(subject_ids, subjects, "subject"),
        rois=_filter(roi_names, rois, "roi"),
        config=config,
        output_dir=Path(output_dir),
    )


def iter_units(plan: RunPlan):
    """Yield every selected (task, subject, roi_name) triple in stable order.

    ROIs a subject does not have are skipped rather than errors, so partial
    ROI coverage across subjects is representable.
    """
    for task in plan.tasks:
        for subject in plan.subjects:
            entry = plan.manifest.subject_entry(subject)
            have = {r.roi.name for r in entry.rois}
            for roi in plan.rois:
                if roi in have:
                    yield task, subject, roi


def run_dir(plan: RunPlan, task: str, subject: str, roi: str) -> Path:
    return plan.output_dir / "runs" / task / subject / _safe(roi)


def eval_dir(plan: RunPlan, task: str, subject: str, roi: str) -> Path:
    return plan.output_dir / "eval" / task / subject / _safe(roi)


def _safe(name: str) -> str:
    return "".join(c if (c.isalnum() or c in "-_") else "_" for c in name)


def _write_sidecar(target: Path, settings: dict, inputs: dict) -> None:
    payload = {
        "tool": _TOOL,
        "settings": settings,
        "inputs": inputs,
    }
    Path(str(target) + ".meta.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", "utf-8"
    )


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, "utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None


def _tag_unit(exc: BrainencError, task: str, subject: str, roi: str):
    note = f"(task={task}, subject={subject}, roi={roi})"
    try:
        return type(exc)(f"{note} {exc}")
    except TypeError:
        return BrainencError(f"{note} {exc}")


# --------------------------------------------------------------------------
# encode


def _encode_one_task(plan: RunPlan, task: str, save_weights: bool, log: Callable[[str], None]):
    manifest = plan.manifest
    features = manifest.load_features(task)
    feature_digest = sha256_file(manifest.task_entry(task).feature_path)
    folds = assign_folds(
        features.n_samples, plan.config.k_folds, plan.config.fold_scheme, plan.config.seed
    )
    solver = FoldwiseRidge(features.values, folds, plan.config)
    for subject in plan.subjects:
        entry = manifest.subject_entry(subject)
        have = {r.roi.name: r for r in entry.rois}
        for roi in plan.rois:
            if roi not in have:
                continue
            try:
                response = manifest.load_response(subject, roi)
                pair = validate_pairing(features, response)
                models, predictions = solver.encode(pair.Y)
                run = EncodingRun(
                    task=features.task,
                    subject_id=subject,
                    roi=response.roi,
                    config=plan.config,
                    folds=folds,
                    models=models,
                    predictions=predictions,
                )
                digests = {
                    "features": feature_digest,
                    "response": sha256_file(have[roi].response_path),
                }
                save_run(run, run_dir(plan, task, subject, roi), digests, save_weights)
            except BrainencError as exc:
                raise _tag_unit(exc, task, subject, roi) from None
            log(f"encoded task={task} subject={subject} roi={roi}")


def cmd_encode(plan: RunPlan, threads: int = 1, save_weights: bool = False, log=None) -> int:
    """Fit one EncodingRun per selected (task, subject, ROI); returns run count.

    BLAS pools are pinned to one thread for the whole stage so numeric output
    is bit-identical whatever ``threads`` is; parallelism comes from running
    independent tasks on a worker pool.
    """
    log = log or (lambda msg: None)
    units = list(iter_units(plan))
    if not units:
        raise FilterEmpty("selection is empty; nothing to encode")
    with threadpool_limits(limits=1):
        if threads <= 1:
            for task in plan.tasks:
                _encode_one_task(plan, task, save_weights, log)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(_encode_one_task, plan, task, save_weights, log)
                    for task in plan.tasks
                ]
                for f in futures:
                    f.result()
    index = sorted(
        str(run_dir(plan, t, s, r).relative_to(plan.output_dir)) for t, s, r in units
    )
    _write_text(
        plan.output_dir / "runs" / "index.json",
        json.dumps({"runs": index, "tool": _TOOL}, sort_keys=True, indent=2) + "\n",
    )
    return len(units)


# --------------------------------------------------------------------------
# evaluate


def _load_report(plan: RunPlan, task: str, subject: str, roi: str) -> tuple[MetricReport, dict]:
    rdir = run_dir(plan, task, subject, roi)
    sidecar = load_run_sidecar(rdir)
    predictions = load_run_predictions(rdir)
    response = plan.manifest.load_response(subject, roi)
    features_task = plan.manifest.task_entry(task).task
    return compute_report(
        response.values,
        predictions,
        task=features_task,
        subject_id=subject,
        roi=response.roi,
        pc_mode=plan.config.pc_mode,
        dataset_id=plan.manifest.dataset_id,
    ), sidecar


def cmd_evaluate(plan: RunPlan, log=None) -> Path:
    """Score every selected run; writes the long-format metrics CSV plus
    per-voxel score vectors and per-(task, subject) voxel tables."""
    log = log or (lambda msg: None)
    units = list(iter_units(plan))
    if not units:
        raise FilterEmpty("selection is empty; nothing to evaluate")
    rows = []
    reports_by_ts: dict[tuple[str, str], list[MetricReport]] = {}
    input_digests = {}
    for task, subject, roi in units:
        try:
            report, sidecar = _load_report(plan, task, subject, roi)
        except BrainencError as exc:
            raise _tag_unit(exc, task, subject, roi) from None
        rows.extend(report.to_rows())
        reports_by_ts.setdefault((task, subject), []).append(report)
        edir = eval_dir(plan, task, subject, roi)
        edir.mkdir(parents=True, exist_ok=True)
        bio.write_array(report.per_voxel_pearson.reshape(1, -1), edir / "per_voxel_pearson.npy")
        bio.write_array(report.per_voxel_mae.reshape(1, -1), edir / "per_voxel_mae.npy")
        _write_sidecar(
            edir / "per_voxel_scores",
            {"pc_mode": plan.config.pc_mode, "config": plan.config.to_json()},
            sidecar.get("inputs", {}),
        )
        input_digests[f"{task}/{subject}/{roi}"] = sidecar.get("inputs", {})
        log(f"evaluated task={task} subject={subject} roi={roi}")
    metrics_path = plan.output_dir / "eval" / "metrics.csv"
    lines = ["dataset,task,subject,roi,metric,value"]
    for dataset, task, subject, roi, metric, value in rows:
        lines.append(f"{dataset},{task},{subject},{roi},{metric},{value!r}")
    _write_text(metrics_path, "\n".join(lines) + "\n")
    _write_sidecar(metrics_path, {"config": plan.config.to_json()}, input_digests)
    for (task, subject), reports in sorted(reports_by_ts.items()):
        for metric in ("mae", "pearson"):
            table = export_voxel_scores(reports, metric)
            vdir = plan.output_dir / "eval" / task / subject
            _write_text(vdir / f"voxel_{metric}.csv", voxel_table_csv(table))
            _write_text(vdir / f"voxel_{metric}_summary.csv", roi_summary_csv(table))
            ts_inputs = {
                key: val for key, val in input_digests.items()
                if key.startswith(f"{task}/{subject}/")
            }
            for name in (f"voxel_{metric}.csv", f"voxel_{metric}_summary.csv"):
                _write_sidecar(
                    vdir / name,
                    {"metric": metric, "config": plan.config.to_json()},
                    ts_inputs,
                )
    return metrics_path


def read_metrics_csv(path) -> list[dict]:
    path = Path(path)
    if not path.is_file():
        raise MissingUpstream(f"no metrics table at {path}; run `brainenc evaluate` first")
    lines = path.read_text("utf-8").strip().split("\n")
    header = lines[0].split(",")
    out = []
    for line in lines[1:]:
        cells = line.split(",")
        rec = dict(zip(header, cells))
        rec["value"] = float(rec["value"])
        out.append(rec)
    return out


# --------------------------------------------------------------------------
# stats


def cmd_stats(
    plan: RunPlan,
    metric: str = "pearson",
    correction_family: Optional[int] = None,
    include_base: bool = False,
) -> Path:
    """Per-ROI one-way ANOVA across tasks plus Bonferroni-corrected pairwise
    comparisons, on per-subject metric values from the evaluate stage."""
    metrics_path = plan.output_dir / "eval" / "metrics.csv"
    records = [r for r in read_metrics_csv(metrics_path) if r["metric"] == metric]
    if not records:
        raise MissingUpstream(f"metrics table has no rows for metric {metric!r}")
    tasks = [t for t in plan.tasks if include_base or t != "BASE"]
    if len(tasks) < 2:
        raise FilterEmpty("stats needs at least two tasks after BASE exclusion")
    stats_dir = plan.output_dir / "stats"
    values: dict[tuple[str, str], dict[str, float]] = {}
    for rec in records:
        values[(rec["roi"], rec["task"])] = values.get((rec["roi"], rec["task"]), {})
        values[(rec["roi"], rec["task"])][rec["subject"]] = rec["value"]
    main_results = {}
    pairwise_paths = []
    for roi in plan.rois:
        groups = {}
        for task in tasks:
            per_subject = values.get((roi, task), {})
            vec = [per_subject[s] for s in plan.subjects if s in per_subject]
            if vec:
                groups[task] = vec
        if len(groups) < 2:
            continue
        main_results[roi] = one_way_anova(list(groups.values()))
        table = pairwise_posthoc(groups, correction_family)
        ppath = stats_dir / f"pairwise_{_safe(roi)}.csv"
        _write_text(ppath, "\n".join(pairwise_csv_rows(table)) + "\n")
        _write_sidecar(
            ppath,
            {"metric": metric, "family_m": table.family_m, "tasks": list(groups)},
            {"metrics_csv": sha256_file(metrics_path)},
        )
        pairwise_paths.append(ppath)
    if not main_results:
        raise MissingUpstream("no ROI had two or more task groups to compare")
    main_path = stats_dir / "main_effects.csv"
    _write_text(main_path, "\n".join(anova_csv_rows(main_results)) + "\n")
    _write_sidecar(
        main_path,
        {"metric": metric, "tasks": tasks, "include_base": include_base},
        {"metrics_csv": sha256_file(metrics_path)},
    )
    return main_path


# --------------------------------------------------------------------------
# similarity


def _score_vector(plan: RunPlan, mode: str, task: str, subject: str, roi: str) -> np.ndarray:
    if mode == "prediction-score":
        path = eval_dir(plan, task, subject, roi) / "per_voxel_pearson.npy"
        if not path.is_file():
            raise MissingUpstream(f"no per-voxel scores at {path}; run `brainenc evaluate` first")
        return bio.read_array(path).ravel()
    # prediction-values: per-voxel mean of the out-of-fold predictions
    return load_run_predictions(run_dir(plan, task, subject, roi)).mean(axis=0)


def build_similarity(plan: RunPlan, mode: str) -> TaskSimilarity:
    """Task-by-task similarity in the requested mode, averaged across subjects
    for the prediction modes."""
    if mode == "representation-rsa":
        feats = {task: plan.manifest.load_features(task) for task in plan.tasks}
        return representation_similarity(feats)
    per_subject_matrices = []
    for subject in plan.subjects:
        scores = {}
        for task in plan.tasks:
            parts = []
            entry = plan.manifest.subject_entry(subject)
            have = {r.roi.name for r in entry.rois}
            for roi in plan.rois:
                if roi in have:
                    parts.append(_score_vector(plan, mode, task, subject, roi))
            if parts:
                scores[task] = np.concatenate(parts)
        per_subject_matrices.append(prediction_similarity(scores, mode).matrix)
    mean = np.mean(per_subject_matrices, axis=0)
    # element-wise averaging keeps symmetry and the unit diagonal exactly
    return TaskSimilarity(tasks=plan.tasks, matrix=mean, mode=mode)


def cmd_similarity(plan: RunPlan, mode: str = "prediction-score", linkage: str = "average") -> Path:
    """Build the similarity matrix, cluster it, and export heatmap + dendrogram."""
    sim = build_similarity(plan, mode)
    dendro = cluster(sim, linkage)
    sdir = plan.output_dir / "similarity"
    sdir.mkdir(parents=True, exist_ok=True)
    tag = mode
    csv_path = sdir / f"similarity_{tag}.csv"
    export_heatmap(sim, csv_path, sdir / f"similarity_{tag}.svg", title=f"task similarity ({mode})")
    export_dendrogram(
        dendro,
        sdir / f"dendrogram_{tag}.newick",
        sdir / f"dendrogram_{tag}.json",
        sdir / f"dendrogram_{tag}.svg",
        title=f"task dendrogram ({mode}, {linkage} linkage)",
    )
    settings = {"mode": mode, "linkage": linkage, "tasks": list(plan.tasks)}
    for name in (
        f"similarity_{tag}.csv",
        f"similarity_{tag}.svg",
        f"dendrogram_{tag}.newick",
        f"dendrogram_{tag}.json",
        f"dendrogram_{tag}.svg",
    ):
        _write_sidecar(sdir / name, settings, {})
    return csv_path


# --------------------------------------------------------------------------
# report


def cmd_report(plan: RunPlan) -> Path:
    """Bar charts of mean 2V2 / Pearson per ROI per task, averaged across subjects."""
    metrics_path = plan.output_dir / "eval" / "metrics.csv"
    records = read_metrics_csv(metrics_path)
    rdir = plan.output_dir / "report"
    mean_lines = ["metric,roi,task,mean_value"]
    for metric, pretty in (("2v2", "2V2 accuracy"), ("pearson", "Pearson correlation")):
        table = []
        for roi in plan.rois:
            row = []
            for task in plan.tasks:
                vals = [
                    r["value"]
                    for r in records
                    if r["metric"] == metric
                    and r["roi"] == roi
                    and r["task"] == task
                    and r["subject"] in plan.subjects
                ]
                mean = float(np.mean(vals)) if vals else 0.0
                row.append(mean)
                mean_lines.append(f"{metric},{roi},{task},{mean!r}")
            table.append(row)
        svg_text = grouped_bars_svg(
            plan.rois,
            plan.tasks,
            table,
            title=f"mean {pretty} by ROI and task (subject average)",
            y_label=pretty,
        )
        _write_text(rdir / f"mean_{metric}.svg", svg_text)
        _write_sidecar(
            rdir / f"mean_{metric}.svg",
            {"metric": metric, "tasks": list(plan.tasks), "rois": list(plan.rois)},
            {"metrics_csv": sha256_file(metrics_path)},
        )
    means_path = rdir / "report_means.csv"
    _write_text(means_path, "\n".join(mean_lines) + "\n")
    _write_sidecar(means_path, {"tasks": list(plan.tasks)}, {"metrics_csv": sha256_file(metrics_path)})
    return means_path
