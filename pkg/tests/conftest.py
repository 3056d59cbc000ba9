import json

import numpy as np
import pytest

from brainenc.io import write_array


def build_manifest(
    root,
    task_codes=("CR", "NER", "BASE"),
    subjects=("sub1", "sub2"),
    roi_specs=(("Language_LH", "L", 4), ("PMC_L", "L", 3)),
    n_samples=40,
    dim=6,
    noise=0.05,
    seed=7,
    defaults=None,
    atlas_labels=False,
):
    """Write a small synthetic experiment (features + responses + manifest.json).

    Responses are noisy linear functions of each task's features so encoders
    have real signal to find.
    """
    rng = np.random.default_rng(seed)
    (root / "features").mkdir(parents=True, exist_ok=True)
    (root / "responses").mkdir(parents=True, exist_ok=True)
    tasks = []
    features = {}
    for code in task_codes:
        X = rng.standard_normal((n_samples, dim))
        features[code] = X
        path = root / "features" / f"{code}.npy"
        write_array(X, path)
        tasks.append({"code": code, "feature_path": f"features/{code}.npy", "dim": dim})
    subjects_doc = []
    for subject in subjects:
        rois = []
        for name, hemi, voxels in roi_specs:
            W = rng.standard_normal((dim, voxels))
            base_task = task_codes[0]
            Y = features[base_task] @ W + noise * rng.standard_normal((n_samples, voxels))
            fname = f"responses/{subject}_{name}.npy"
            write_array(Y, root / fname)
            roi = {
                "name": name,
                "hemisphere": hemi,
                "voxel_count": voxels,
                "atlas": "AAL",
                "response_path": fname,
            }
            if atlas_labels:
                roi["atlas_label_ids"] = list(range(100, 100 + voxels))
            rois.append(roi)
        subjects_doc.append({"subject_id": subject, "rois": rois})
    doc = {
        "dataset_id": "synthetic",
        "tasks": tasks,
        "subjects": subjects_doc,
    }
    if defaults:
        doc["defaults"] = defaults
    path = root / "manifest.json"
    path.write_text(json.dumps(doc, indent=2), "utf-8")
    return path


@pytest.fixture
def tiny_manifest(tmp_path):
    return build_manifest(tmp_path)
