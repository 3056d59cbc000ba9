"""Write extracted features as NPY v1.0 plus a manifest fragment.

The NPY file is the interchange surface with the encoding toolkit: 2-D
float64, C-order, little-endian, written by the ecosystem's native writer.
The JSON fragment carries everything needed to splice the task into an
experiment manifest (task code, dim, relative path, extraction settings).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import IoError


def emit(features: np.ndarray, task: str, out_dir, settings: dict = None):
    """Write ``<task>.npy`` and ``<task>.fragment.json``; returns both paths."""
    arr = np.ascontiguousarray(np.asarray(features), dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise IoError(f"features must be a nonempty 2-D matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise IoError("features contain NaN or Inf")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        npy_path = out_dir / f"{task}.npy"
        np.save(npy_path, arr)
    except OSError as exc:
        raise IoError(f"cannot write under {out_dir}: {exc}") from None
    fragment = {
        "code": task,
        "feature_path": npy_path.name,
        "dim": int(arr.shape[1]),
        "n_rows": int(arr.shape[0]),
        "extraction": settings or {},
    }
    fragment_path = out_dir / f"{task}.fragment.json"
    fragment_path.write_text(json.dumps(fragment, sort_keys=True, indent=2) + "\n", "utf-8")
    return npy_path, fragment_path
