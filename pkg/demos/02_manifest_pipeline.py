"""
Running the batch pipeline from a manifest
==========================================

Writes a small experiment to disk (feature and response matrices in the
NPY interchange format plus a JSON manifest), then drives all five stages:
encode -> evaluate -> stats -> similarity -> report. The same flow works
from the shell:

    brainenc encode     --manifest manifest.json --out out
    brainenc evaluate   --manifest manifest.json --out out
    brainenc stats      --manifest manifest.json --out out
    brainenc similarity --manifest manifest.json --out out
    brainenc report     --manifest manifest.json --out out
"""

import json
from pathlib import Path

import numpy as np

from brainenc import load_manifest, write_array
from brainenc.pipeline import (
    cmd_encode,
    cmd_evaluate,
    cmd_report,
    cmd_similarity,
    cmd_stats,
    resolve_plan,
)

root = Path(__file__).parent / "demo_output" / "pipeline"
root.mkdir(parents=True, exist_ok=True)
rng = np.random.default_rng(1)

n, dim = 60, 12
tasks = ["CR", "NER", "SS", "BASE"]
subjects = ["sub1", "sub2", "sub3"]
rois = [("Language_LH", "L", 6), ("PMC_L", "L", 4)]

(root / "features").mkdir(exist_ok=True)
(root / "responses").mkdir(exist_ok=True)
feature_values = {}
for code in tasks:
    feature_values[code] = rng.standard_normal((n, dim))
    write_array(feature_values[code], root / "features" / f"{code}.npy")

subjects_doc = []
for subject in subjects:
    roi_docs = []
    for name, hemi, voxels in rois:
        # responses follow the CR features, so CR should win the comparison
        W = rng.standard_normal((dim, voxels))
        Y = feature_values["CR"] @ W + 2.0 * rng.standard_normal((n, voxels))
        write_array(Y, root / "responses" / f"{subject}_{name}.npy")
        roi_docs.append({
            "name": name, "hemisphere": hemi, "voxel_count": voxels,
            "atlas": "AAL", "response_path": f"responses/{subject}_{name}.npy",
        })
    subjects_doc.append({"subject_id": subject, "rois": roi_docs})

manifest_path = root / "manifest.json"
manifest_path.write_text(json.dumps({
    "dataset_id": "pipeline-demo",
    "tasks": [
        {"code": c, "feature_path": f"features/{c}.npy", "dim": dim} for c in tasks
    ],
    "subjects": subjects_doc,
}, indent=2))

plan = resolve_plan(load_manifest(manifest_path), root / "out")
n_runs = cmd_encode(plan, threads=2)
print(f"encode    : {n_runs} runs")
metrics_csv = cmd_evaluate(plan)
print(f"evaluate  : {metrics_csv}")
main_csv = cmd_stats(plan)
print(f"stats     : {main_csv}")
sim_csv = cmd_similarity(plan, mode="prediction-score", linkage="average")
print(f"similarity: {sim_csv}")
means_csv = cmd_report(plan)
print(f"report    : {means_csv}")

print("\nmain effects (tasks compared per ROI, BASE excluded):")
print(main_csv.read_text())
print("mean pearson per (roi, task):")
for line in means_csv.read_text().strip().split("\n"):
    if line.startswith("pearson"):
        print("  " + line)
