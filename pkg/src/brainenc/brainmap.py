"""Per-voxel score export for external brain-map rendering.

Rendering onto a cortical surface is delegated to outside tools; what leaves
this module is one row per voxel (with the atlas label when the manifest
carries one) plus a compact per-ROI mean summary.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io as bio
from .errors import IoError, MissingScores, ValidationError
from .metrics import MetricReport
from .types import TaskId

CSV_COLUMNS = ("voxel_index", "atlas_label", "roi_name", "task", "subject", "metric", "score")


@dataclass(frozen=True)
class VoxelScoreRow:
    voxel_index: int
    atlas_label: Optional[int]
    roi_name: str
    score: float


@dataclass(frozen=True)
class VoxelScoreTable:
    """All exported voxels for one (task, subject), ROI by ROI."""

    rows: tuple[VoxelScoreRow, ...]
    roi_means: tuple[tuple[str, float], ...]
    metric: str
    task: TaskId
    subject_id: str


def export_voxel_scores(reports: Sequence[MetricReport], metric: str) -> VoxelScoreTable:
    """Flatten per-voxel score vectors of one subject's reports into a table.

    ``metric`` selects which vector is exported ("mae" or "pearson"); every
    report must belong to the same (task, subject).
    """
    if metric not in ("mae", "pearson"):
        raise ValidationError(f"metric must be 'mae' or 'pearson', got {metric!r}")
    if not reports:
        raise MissingScores("no metric reports given")
    task = reports[0].task
    subject = reports[0].subject_id
    rows: list[VoxelScoreRow] = []
    roi_means: list[tuple[str, float]] = []
    for rep in reports:
        if rep.task.code != task.code or rep.subject_id != subject:
            raise ValidationError(
                "all reports in one table must share (task, subject); "
                f"got ({rep.task.code}, {rep.subject_id}) vs ({task.code}, {subject})"
            )
        vector = rep.per_voxel_mae if metric == "mae" else rep.per_voxel_pearson
        if vector is None or len(vector) != rep.roi.voxel_count:
            raise MissingScores(
                f"report for {rep.roi.name} lacks a complete per-voxel {metric} vector"
            )
        labels = rep.roi.atlas_label_ids
        for v in range(rep.roi.voxel_count):
            rows.append(
                VoxelScoreRow(
                    voxel_index=v,
                    atlas_label=labels[v] if labels is not None else None,
                    roi_name=rep.roi.name,
                    score=float(vector[v]),
                )
            )
        roi_means.append((rep.roi.name, float(np.mean(vector))))
    return VoxelScoreTable(
        rows=tuple(rows),
        roi_means=tuple(roi_means),
        metric=metric,
        task=task,
        subject_id=subject,
    )


def voxel_table_csv(table: VoxelScoreTable) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in table.rows:
        label = "" if row.atlas_label is None else str(row.atlas_label)
        lines.append(
            f"{row.voxel_index},{label},{row.roi_name},{table.task.code},"
            f"{table.subject_id},{table.metric},{row.score!r}"
        )
    return "\n".join(lines) + "\n"


def roi_summary_csv(table: VoxelScoreTable) -> str:
    lines = [f"roi,mean_{table.metric}"]
    for roi_name, mean in table.roi_means:
        lines.append(f"{roi_name},{mean!r}")
    return "\n".join(lines) + "\n"


def write_voxel_scores(table: VoxelScoreTable, csv_path, summary_path=None, npy_path=None) -> None:
    """Write the table as CSV, plus optional summary CSV and raw score vector."""
    try:
        Path(csv_path).write_text(voxel_table_csv(table), "utf-8")
        if summary_path is not None:
            Path(summary_path).write_text(roi_summary_csv(table), "utf-8")
    except OSError as exc:
        raise IoError(str(exc)) from None
    if npy_path is not None:
        scores = np.array([[row.score for row in table.rows]])
        bio.write_array(scores, npy_path)
