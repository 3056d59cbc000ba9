"""Experiment manifest: one JSON file describing tasks, subjects and ROIs.

Schema (all paths are resolved relative to the manifest's directory)::

    {
      "dataset_id": "pereira",
      "sample_ids": ["s0", "s1", ...],            # optional, shared by all matrices
      "defaults": {"lambda": 1.0, "k_folds": 10,  # optional EncodingConfig overrides
                   "standardize": "zscore", "pc_mode": "per-sample",
                   "fold_scheme": "contiguous", "seed": 0},
      "tasks": [
        {"code": "CR", "feature_path": "features/CR.npy", "dim": 768}
      ],
      "subjects": [
        {"subject_id": "P01",
         "rois": [
           {"name": "Language_LH", "hemisphere": "L", "voxel_count": 5265,
            "atlas": "AAL", "atlas_label_ids": [..],     # optional
            "response_path": "responses/P01_Language_LH.npy"}
         ]}
      ]
    }

Violations are reported with the exact field path (``subjects[1].rois[0].name``)
so a 45-entry manifest stays debuggable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import io as bio
from .errors import MissingFile, ParseError, SchemaViolation
from .types import (
    EncodingConfig,
    FeatureMatrix,
    ResponseMatrix,
    RoiSpec,
    TaskId,
)


@dataclass(frozen=True)
class TaskEntry:
    task: TaskId
    feature_path: Path
    dim: int


@dataclass(frozen=True)
class RoiEntry:
    roi: RoiSpec
    response_path: Path


@dataclass(frozen=True)
class SubjectEntry:
    subject_id: str
    rois: tuple[RoiEntry, ...]


@dataclass(frozen=True)
class Manifest:
    dataset_id: str
    tasks: tuple[TaskEntry, ...]
    subjects: tuple[SubjectEntry, ...]
    defaults: EncodingConfig
    sample_ids: Optional[tuple[str, ...]]
    root: Path

    def task_codes(self) -> list[str]:
        return [t.task.code for t in self.tasks]

    def task_entry(self, code: str) -> TaskEntry:
        for t in self.tasks:
            if t.task.code == code:
                return t
        raise KeyError(code)

    def subject_entry(self, subject_id: str) -> SubjectEntry:
        for s in self.subjects:
            if s.subject_id == subject_id:
                return s
        raise KeyError(subject_id)

    def _ids_for(self, n_rows: int) -> tuple[str, ...]:
        if self.sample_ids is not None:
            return self.sample_ids
        return tuple(f"s{i:06d}" for i in range(n_rows))

    def load_features(self, code: str) -> FeatureMatrix:
        entry = self.task_entry(code)
        values = bio.read_array(entry.feature_path)
        return FeatureMatrix(
            task=entry.task,
            values=values,
            sample_ids=self._ids_for(values.shape[0]),
            dataset_id=self.dataset_id,
        )

    def load_response(self, subject_id: str, roi_name: str) -> ResponseMatrix:
        subject = self.subject_entry(subject_id)
        for entry in subject.rois:
            if entry.roi.name == roi_name:
                values = bio.read_array(entry.response_path)
                return ResponseMatrix(
                    subject_id=subject_id,
                    roi=entry.roi,
                    values=values,
                    sample_ids=self._ids_for(values.shape[0]),
                )
        raise KeyError(roi_name)


def _expect(obj, typ, path: str):
    if not isinstance(obj, typ):
        want = typ[0].__name__ if isinstance(typ, tuple) else typ.__name__
        raise SchemaViolation(path, f"expected {want}, got {type(obj).__name__}")
    return obj


def _expect_key(d: dict, key: str, path: str):
    if key not in d:
        raise SchemaViolation(f"{path}.{key}", "missing required field")
    return d[key]


def load_manifest(path) -> Manifest:
    """Parse and fully validate a manifest file.

    Every referenced feature/response file must exist at load time; duplicate
    task codes or (subject, roi) pairs are rejected.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"manifest not found: {path}")
    try:
        doc = json.loads(path.read_text("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    root = path.parent
    _expect(doc, dict, "$")

    dataset_id = _expect(_expect_key(doc, "dataset_id", "$"), str, "$.dataset_id")

    sample_ids = None
    if "sample_ids" in doc:
        raw_ids = _expect(doc["sample_ids"], list, "$.sample_ids")
        sample_ids = tuple(str(s) for s in raw_ids)
        if len(set(sample_ids)) != len(sample_ids):
            raise SchemaViolation("$.sample_ids", "duplicate sample ids")

    try:
        defaults = EncodingConfig.from_json(_expect(doc.get("defaults", {}), dict, "$.defaults"))
    except (TypeError, ValueError) as exc:
        raise SchemaViolation("$.defaults", str(exc)) from None

    raw_tasks = _expect(_expect_key(doc, "tasks", "$"), list, "$.tasks")
    if not raw_tasks:
        raise SchemaViolation("$.tasks", "at least one task is required")
    tasks = []
    seen_codes = set()
    for i, raw in enumerate(raw_tasks):
        tpath = f"$.tasks[{i}]"
        _expect(raw, dict, tpath)
        code = _expect(_expect_key(raw, "code", tpath), str, f"{tpath}.code")
        if code in seen_codes:
            raise SchemaViolation(f"{tpath}.code", f"duplicate task {code!r}")
        seen_codes.add(code)
        try:
            task = TaskId(code, raw.get("display_name", ""))
        except Exception as exc:
            raise SchemaViolation(f"{tpath}.code", str(exc)) from None
        fpath = root / _expect(_expect_key(raw, "feature_path", tpath), str, f"{tpath}.feature_path")
        if not fpath.is_file():
            raise MissingFile(f"{tpath}.feature_path: no such file {fpath}")
        dim = _expect(_expect_key(raw, "dim", tpath), int, f"{tpath}.dim")
        if dim < 1:
            raise SchemaViolation(f"{tpath}.dim", f"must be >= 1, got {dim}")
        tasks.append(TaskEntry(task=task, feature_path=fpath, dim=dim))

    raw_subjects = _expect(_expect_key(doc, "subjects", "$"), list, "$.subjects")
    if not raw_subjects:
        raise SchemaViolation("$.subjects", "at least one subject is required")
    subjects = []
    seen_subjects = set()
    for i, raw in enumerate(raw_subjects):
        spath = f"$.subjects[{i}]"
        _expect(raw, dict, spath)
        subject_id = _expect(_expect_key(raw, "subject_id", spath), str, f"{spath}.subject_id")
        if subject_id in seen_subjects:
            raise SchemaViolation(f"{spath}.subject_id", f"duplicate subject {subject_id!r}")
        seen_subjects.add(subject_id)
        raw_rois = _expect(_expect_key(raw, "rois", spath), list, f"{spath}.rois")
        if not raw_rois:
            raise SchemaViolation(f"{spath}.rois", "at least one ROI is required")
        rois = []
        seen_rois = set()
        for j, rraw in enumerate(raw_rois):
            rpath = f"{spath}.rois[{j}]"
            _expect(rraw, dict, rpath)
            name = _expect(_expect_key(rraw, "name", rpath), str, f"{rpath}.name")
            if name in seen_rois:
                raise SchemaViolation(f"{rpath}.name", f"duplicate ROI {name!r} for {subject_id}")
            seen_rois.add(name)
            voxel_count = _expect(_expect_key(rraw, "voxel_count", rpath), int, f"{rpath}.voxel_count")
            labels = rraw.get("atlas_label_ids")
            if labels is not None:
                _expect(labels, list, f"{rpath}.atlas_label_ids")
            try:
                roi = RoiSpec(
                    name=name,
                    hemisphere=rraw.get("hemisphere", "NA"),
                    voxel_count=voxel_count,
                    atlas=rraw.get("atlas", ""),
                    atlas_label_ids=tuple(labels) if labels is not None else None,
                )
            except Exception as exc:
                raise SchemaViolation(rpath, str(exc)) from None
            resp = root / _expect(
                _expect_key(rraw, "response_path", rpath), str, f"{rpath}.response_path"
            )
            if not resp.is_file():
                raise MissingFile(f"{rpath}.response_path: no such file {resp}")
            rois.append(RoiEntry(roi=roi, response_path=resp))
        subjects.append(SubjectEntry(subject_id=subject_id, rois=tuple(rois)))

    return Manifest(
        dataset_id=dataset_id,
        tasks=tuple(tasks),
        subjects=tuple(subjects),
        defaults=defaults,
        sample_ids=sample_ids,
        root=root,
    )
