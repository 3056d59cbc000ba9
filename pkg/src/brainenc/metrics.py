"""Evaluation metrics for actual vs predicted response matrices.

Three headline numbers per (task, subject, ROI): pairwise 2V2 accuracy,
Pearson correlation (per-sample rows or per-voxel columns), and mean
absolute error, plus the per-voxel score vectors used for brain maps and
task-similarity analysis.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, TooFewSamples, ZeroVariance, ZeroVector
from .types import RoiSpec, TaskId


def _check_pair(Y, Yhat):
    Y = np.asarray(Y, dtype=np.float64)
    Yhat = np.asarray(Yhat, dtype=np.float64)
    if Y.ndim != 2 or Yhat.ndim != 2:
        raise ShapeMismatch(f"expected 2-D matrices, got {Y.shape} and {Yhat.shape}")
    if Y.shape != Yhat.shape:
        raise ShapeMismatch(f"shapes differ: {Y.shape} vs {Yhat.shape}")
    return Y, Yhat


def cosine_distance(a, b) -> float:
    """1 - cos(a, b); in [0, 2] for nonzero vectors."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine distance undefined for a zero vector")
    return float(1.0 - (a @ b) / (na * nb))


def two_v_two(Y, Yhat) -> float:
    """Fraction of unordered sample pairs whose matched cosine distances beat
    the mismatched ones; ties count as failures.

    For a pair (i, j) the match wins when
    cosD(Y_i, Yhat_i) + cosD(Y_j, Yhat_j) < cosD(Y_i, Yhat_j) + cosD(Y_j, Yhat_i).
    """
    Y, Yhat = _check_pair(Y, Yhat)
    n = Y.shape[0]
    if n < 2:
        raise TooFewSamples(f"2V2 needs at least 2 samples, got {n}")
    norms_y = np.linalg.norm(Y, axis=1)
    norms_p = np.linalg.norm(Yhat, axis=1)
    if (norms_y == 0.0).any() or (norms_p == 0.0).any():
        raise ZeroVector("2V2 undefined when a sample row is all zeros")
    D = 1.0 - (Y / norms_y[:, None]) @ (Yhat / norms_p[:, None]).T
    matched = np.diag(D)
    lhs = matched[:, None] + matched[None, :]
    rhs = D + D.T
    iu = np.triu_indices(n, k=1)
    return float(np.count_nonzero(lhs[iu] < rhs[iu]) / len(iu[0]))


def per_sample_pearson(Y, Yhat) -> np.ndarray:
    """Row-wise correlation across voxels; NaN where a row has zero variance."""
    Y, Yhat = _check_pair(Y, Yhat)
    a = Y - Y.mean(axis=1, keepdims=True)
    b = Yhat - Yhat.mean(axis=1, keepdims=True)
    denom = np.sqrt((a * a).sum(axis=1) * (b * b).sum(axis=1))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (a * b).sum(axis=1) / denom
    r[denom == 0.0] = np.nan
    return r


def per_voxel_pearson(Y, Yhat) -> np.ndarray:
    """Column-wise time-series correlation; NaN where a column has zero variance."""
    Y, Yhat = _check_pair(Y, Yhat)
    a = Y - Y.mean(axis=0)
    b = Yhat - Yhat.mean(axis=0)
    denom = np.sqrt((a * a).sum(axis=0) * (b * b).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (a * b).sum(axis=0) / denom
    r[denom == 0.0] = np.nan
    return r


def pearson_metric(Y, Yhat, mode: str = "per-sample") -> float:
    """Mean Pearson correlation between actual and predicted responses.

    per-sample averages row correlations (each sample's voxel pattern);
    per-voxel averages column correlations (each voxel's time course).
    Zero-variance rows/columns are excluded from the mean with a warning
    instead of poisoning it; they only raise if nothing is left.
    """
    if mode == "per-sample":
        r = per_sample_pearson(Y, Yhat)
    elif mode == "per-voxel":
        r = per_voxel_pearson(Y, Yhat)
    else:
        raise ValueError(f"mode must be 'per-sample' or 'per-voxel', got {mode!r}")
    n_bad = int(np.isnan(r).sum())
    if n_bad == r.size:
        raise ZeroVariance(f"every {mode} unit has zero variance")
    if n_bad:
        warnings.warn(
            f"{n_bad} zero-variance {mode} unit(s) excluded from Pearson mean",
            RuntimeWarning,
            stacklevel=2,
        )
    return float(np.nanmean(r))


def mae(Y, Yhat) -> float:
    """Mean absolute error over all entries."""
    Y, Yhat = _check_pair(Y, Yhat)
    return float(np.abs(Y - Yhat).mean())


def per_voxel_mae(Y, Yhat) -> np.ndarray:
    """Column means of |Y - Yhat| (the per-voxel values mapped onto cortex)."""
    Y, Yhat = _check_pair(Y, Yhat)
    return np.abs(Y - Yhat).mean(axis=0)


@dataclass(frozen=True)
class MetricReport:
    """All metrics for one (task, subject, ROI) cell."""

    task: TaskId
    subject_id: str
    roi: RoiSpec
    twov2: float
    pearson: float
    pearson_mode: str
    mae: float
    per_voxel_pearson: np.ndarray
    per_voxel_mae: np.ndarray
    dataset_id: str = ""

    def to_rows(self):
        """Long-format rows: (dataset, task, subject, roi, metric, value)."""
        base = (self.dataset_id, self.task.code, self.subject_id, self.roi.name)
        return [
            base + ("2v2", self.twov2),
            base + ("pearson", self.pearson),
            base + ("mae", self.mae),
        ]

    def to_json(self) -> dict:
        return {
            "dataset": self.dataset_id,
            "task": self.task.code,
            "subject": self.subject_id,
            "roi": self.roi.name,
            "2v2": self.twov2,
            "pearson": self.pearson,
            "pearson_mode": self.pearson_mode,
            "mae": self.mae,
        }


def compute_report(
    Y,
    Yhat,
    task: TaskId,
    subject_id: str,
    roi: RoiSpec,
    pc_mode: str = "per-sample",
    dataset_id: str = "",
) -> MetricReport:
    """Evaluate one actual/predicted pair into a full MetricReport."""
    return MetricReport(
        task=task,
        subject_id=subject_id,
        roi=roi,
        twov2=two_v_two(Y, Yhat),
        pearson=pearson_metric(Y, Yhat, pc_mode),
        pearson_mode=pc_mode,
        mae=mae(Y, Yhat),
        per_voxel_pearson=per_voxel_pearson(Y, Yhat),
        per_voxel_mae=per_voxel_mae(Y, Yhat),
        dataset_id=dataset_id,
    )
