"""Shared domain types: tasks, matrices, ROIs, folds, and run configuration.

All containers are frozen dataclasses holding read-only numpy arrays, so any
value can be shared across parallel workers without copying or locking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    EmptyMatrix,
    InvalidK,
    MismatchedSamples,
    NonFiniteValues,
    ValidationError,
)

# Ten NLP task codes plus BASE, the pretrained non-finetuned baseline that is
# compared against the finetuned models through the very same pipeline.
TASK_CODES = ("CR", "NER", "NLI", "PD", "QA", "SA", "SRL", "SS", "Sum", "WSD", "BASE")

TASK_NAMES = {
    "CR": "coreference resolution",
    "NER": "named entity recognition",
    "NLI": "natural language inference",
    "PD": "paraphrase detection",
    "QA": "question answering",
    "SA": "sentiment analysis",
    "SRL": "semantic role labeling",
    "SS": "shallow syntax parsing",
    "Sum": "summarization",
    "WSD": "word sense disambiguation",
    "BASE": "pretrained baseline",
}


def _frozen_f64(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, order="C")
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.size == 0:
        raise EmptyMatrix(f"{name} is empty (shape {arr.shape})")
    if not np.isfinite(arr).all():
        raise NonFiniteValues(f"{name} contains NaN or Inf")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TaskId:
    """One of the eleven task codes with a human-readable name."""

    code: str
    display_name: str = ""

    def __post_init__(self):
        if self.code not in TASK_CODES:
            raise ValidationError(
                f"unknown task code {self.code!r}; expected one of {TASK_CODES}"
            )
        if not self.display_name:
            object.__setattr__(self, "display_name", TASK_NAMES[self.code])


@dataclass(frozen=True)
class RoiSpec:
    """A named voxel set (e.g. Language_LH) with atlas bookkeeping."""

    name: str
    hemisphere: str = "NA"
    voxel_count: int = 1
    atlas: str = ""
    atlas_label_ids: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.hemisphere not in ("L", "R", "NA"):
            raise ValidationError(f"hemisphere must be L, R or NA, got {self.hemisphere!r}")
        if self.voxel_count < 1:
            raise ValidationError(f"voxel_count must be >= 1, got {self.voxel_count}")
        if self.atlas_label_ids is not None:
            ids = tuple(int(i) for i in self.atlas_label_ids)
            if len(ids) != self.voxel_count:
                raise ValidationError(
                    f"atlas_label_ids has {len(ids)} entries for {self.voxel_count} voxels"
                )
            object.__setattr__(self, "atlas_label_ids", ids)

    def to_json(self) -> dict:
        d = {
            "name": self.name,
            "hemisphere": self.hemisphere,
            "voxel_count": self.voxel_count,
            "atlas": self.atlas,
        }
        if self.atlas_label_ids is not None:
            d["atlas_label_ids"] = list(self.atlas_label_ids)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "RoiSpec":
        return cls(
            name=d["name"],
            hemisphere=d.get("hemisphere", "NA"),
            voxel_count=int(d["voxel_count"]),
            atlas=d.get("atlas", ""),
            atlas_label_ids=tuple(d["atlas_label_ids"]) if "atlas_label_ids" in d else None,
        )


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-task stimulus representations, samples x dim."""

    task: TaskId
    values: np.ndarray
    sample_ids: tuple[str, ...]
    dataset_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_f64(self.values, "feature matrix"))
        ids = tuple(str(s) for s in self.sample_ids)
        if len(set(ids)) != len(ids):
            raise ValidationError("sample_ids contain duplicates")
        if len(ids) != self.values.shape[0]:
            raise ValidationError(
                f"{len(ids)} sample_ids for {self.values.shape[0]} feature rows"
            )
        object.__setattr__(self, "sample_ids", ids)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ResponseMatrix:
    """Per-subject, per-ROI voxel responses, samples x voxels."""

    subject_id: str
    roi: RoiSpec
    values: np.ndarray
    sample_ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_f64(self.values, "response matrix"))
        ids = tuple(str(s) for s in self.sample_ids)
        if len(ids) != self.values.shape[0]:
            raise ValidationError(
                f"{len(ids)} sample_ids for {self.values.shape[0]} response rows"
            )
        object.__setattr__(self, "sample_ids", ids)
        if self.values.shape[1] != self.roi.voxel_count:
            raise ValidationError(
                f"ROI {self.roi.name} declares {self.roi.voxel_count} voxels, "
                f"matrix has {self.values.shape[1]} columns"
            )

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_voxels(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class FoldAssignment:
    """Sample -> fold-id map for K-fold cross-validation."""

    n_samples: int
    k: int
    fold_of_sample: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.fold_of_sample, dtype=np.int64)
        if arr.shape != (self.n_samples,):
            raise InvalidK(
                f"fold_of_sample has shape {arr.shape}, expected ({self.n_samples},)"
            )
        if self.k < 1 or arr.min(initial=0) < 0 or (arr.max(initial=0) >= self.k):
            raise InvalidK(f"fold ids must lie in [0, {self.k})")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "fold_of_sample", arr)

    def test_indices(self, fold_id: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of_sample == fold_id)

    def train_indices(self, fold_id: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of_sample != fold_id)

    def to_json(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "k": self.k,
            "fold_of_sample": self.fold_of_sample.tolist(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "FoldAssignment":
        return cls(int(d["n_samples"]), int(d["k"]), np.array(d["fold_of_sample"]))


@dataclass(frozen=True)
class EncodingConfig:
    """Ridge and cross-validation settings for one encoding run."""

    lam: float = 1.0
    k_folds: int = 10
    standardize: str = "zscore"  # "zscore" (train-fold) or "none"
    pc_mode: str = "per-sample"  # or "per-voxel"
    fold_scheme: str = "contiguous"  # or "shuffled"
    seed: int = 0

    def __post_init__(self):
        if self.lam < 0:
            raise ValidationError(f"lambda must be >= 0, got {self.lam}")
        if self.k_folds < 2:
            raise InvalidK(f"k_folds must be >= 2, got {self.k_folds}")
        if self.standardize not in ("zscore", "none"):
            raise ValidationError(f"standardize must be 'zscore' or 'none', got {self.standardize!r}")
        if self.pc_mode not in ("per-sample", "per-voxel"):
            raise ValidationError(f"pc_mode must be 'per-sample' or 'per-voxel', got {self.pc_mode!r}")
        if self.fold_scheme not in ("contiguous", "shuffled"):
            raise ValidationError(f"fold_scheme must be 'contiguous' or 'shuffled', got {self.fold_scheme!r}")

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "k_folds": self.k_folds,
            "standardize": self.standardize,
            "pc_mode": self.pc_mode,
            "fold_scheme": self.fold_scheme,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, d: dict) -> "EncodingConfig":
        return cls(
            lam=float(d.get("lambda", 1.0)),
            k_folds=int(d.get("k_folds", 10)),
            standardize=d.get("standardize", "zscore"),
            pc_mode=d.get("pc_mode", "per-sample"),
            fold_scheme=d.get("fold_scheme", "contiguous"),
            seed=int(d.get("seed", 0)),
        )


@dataclass(frozen=True)
class PairedDataset:
    """A feature/response pair whose rows are verifiably the same stimuli."""

    features: FeatureMatrix
    responses: ResponseMatrix

    @property
    def n_samples(self) -> int:
        return self.features.n_samples

    @property
    def dim(self) -> int:
        return self.features.dim

    @property
    def voxels(self) -> int:
        return self.responses.n_voxels

    @property
    def X(self) -> np.ndarray:
        return self.features.values

    @property
    def Y(self) -> np.ndarray:
        return self.responses.values


def validate_pairing(f: FeatureMatrix, r: ResponseMatrix) -> PairedDataset:
    """Pair a feature and a response matrix after checking stimulus alignment.

    The pairing is by explicit ordered identifier, never by row position:
    identical ids in a different order are rejected.
    """
    if f.sample_ids != r.sample_ids:
        nf, nr = len(f.sample_ids), len(r.sample_ids)
        if nf != nr:
            detail = f"{nf} feature rows vs {nr} response rows"
        else:
            first = next(
                i for i, (a, b) in enumerate(zip(f.sample_ids, r.sample_ids)) if a != b
            )
            detail = (
                f"first difference at row {first}: "
                f"{f.sample_ids[first]!r} vs {r.sample_ids[first]!r}"
            )
        raise MismatchedSamples(f"sample ids differ: {detail}")
    return PairedDataset(features=f, responses=r)
