"""
Task similarity matrices and dendrograms
========================================

Shows both similarity spaces on synthetic data: prediction space (per-voxel
score vectors correlated between tasks) and representation space (RSA over
stimulus-by-stimulus correlation matrices), then clusters each matrix and
exports heatmap + Newick/JSON/SVG trees.
"""

from pathlib import Path

import numpy as np

from brainenc import (
    FeatureMatrix,
    TaskId,
    cluster,
    prediction_similarity,
    representation_similarity,
    to_newick,
)
from brainenc.taskonomy import export_dendrogram, export_heatmap

out = Path(__file__).parent / "demo_output" / "similarity"
out.mkdir(parents=True, exist_ok=True)
rng = np.random.default_rng(2)

# --- prediction space: three related score profiles plus one outlier
n_voxels = 2000
base_profile = rng.standard_normal(n_voxels)
scores = {
    "CR": base_profile + 0.3 * rng.standard_normal(n_voxels),
    "NER": base_profile + 0.3 * rng.standard_normal(n_voxels),
    "SS": base_profile + 0.6 * rng.standard_normal(n_voxels),
    "QA": rng.standard_normal(n_voxels),
}
sim = prediction_similarity(scores)
print("prediction-space similarity:")
for i, code in enumerate(sim.tasks):
    row = " ".join(f"{v:+.2f}" for v in sim.matrix[i])
    print(f"  {code:>4} {row}")

dendro = cluster(sim, linkage="average")
print("merge tree:", to_newick(dendro))
export_heatmap(sim, out / "prediction_sim.csv", out / "prediction_sim.svg",
               title="prediction-space task similarity")
export_dendrogram(dendro, out / "prediction_tree.newick", out / "prediction_tree.json",
                  out / "prediction_tree.svg", title="prediction-space tree")

# --- representation space: RSA tolerates different feature dimensionalities
n_samples = 30
shared = rng.standard_normal((n_samples, 8))
features = {
    "CR": FeatureMatrix(TaskId("CR"), shared + 0.2 * rng.standard_normal((n_samples, 8)),
                        [f"s{i}" for i in range(n_samples)]),
    "NER": FeatureMatrix(TaskId("NER"), shared + 0.2 * rng.standard_normal((n_samples, 8)),
                         [f"s{i}" for i in range(n_samples)]),
    # a wider feature space, as an encoder-decoder checkpoint might emit
    "Sum": FeatureMatrix(TaskId("Sum"), rng.standard_normal((n_samples, 24)),
                         [f"s{i}" for i in range(n_samples)]),
}
rsa = representation_similarity(features)
print("\nrepresentation-space (RSA) similarity:")
for i, code in enumerate(rsa.tasks):
    row = " ".join(f"{v:+.2f}" for v in rsa.matrix[i])
    print(f"  {code:>4} {row}")
export_heatmap(rsa, out / "rsa_sim.csv", out / "rsa_sim.svg", title="RSA task similarity")
export_dendrogram(cluster(rsa), out / "rsa_tree.newick", out / "rsa_tree.json",
                  out / "rsa_tree.svg", title="RSA tree")
print(f"\nwrote exports under {out}")
