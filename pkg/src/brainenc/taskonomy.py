"""Task-by-task similarity matrices and hierarchical clustering.

Two similarity spaces are supported: prediction space (correlating per-voxel
score vectors between tasks) and representation space (correlating the
upper triangles of each task's stimulus-by-stimulus correlation matrix, the
classic RSA construction). Either kind of matrix feeds the agglomerative
clusterer, whose merge tree exports to Newick, JSON and SVG.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import svg as _svg
from .errors import (
    EmptyInput,
    IoError,
    LengthMismatch,
    MismatchedSamples,
    ValidationError,
    ZeroVariance,
)
from .types import FeatureMatrix

SIMILARITY_MODES = ("prediction-score", "prediction-values", "representation-rsa")
LINKAGES = ("average", "complete", "single")


def _pearson_matrix(rows: np.ndarray) -> np.ndarray:
    """Row-by-row Pearson correlation; exactly symmetric, unit diagonal."""
    centered = rows - rows.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered * centered).sum(axis=1))
    if (norms == 0.0).any():
        bad = int(np.flatnonzero(norms == 0.0)[0])
        raise ZeroVariance(f"vector {bad} is constant; correlation undefined")
    unit = centered / norms[:, None]
    m = unit @ unit.T
    np.clip(m, -1.0, 1.0, out=m)
    np.fill_diagonal(m, 1.0)
    return m


@dataclass(frozen=True)
class TaskSimilarity:
    """tasks x tasks correlation matrix; symmetric, unit diagonal."""

    tasks: tuple[str, ...]
    matrix: np.ndarray
    mode: str

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64)
        n = len(self.tasks)
        if m.shape != (n, n):
            raise ValidationError(f"matrix shape {m.shape} does not match {n} tasks")
        if self.mode not in SIMILARITY_MODES:
            raise ValidationError(f"unknown similarity mode {self.mode!r}")
        if np.abs(m - m.T).max(initial=0.0) > 1e-12:
            raise ValidationError("similarity matrix is not symmetric")
        if np.abs(np.diag(m) - 1.0).max(initial=0.0) > 1e-12:
            raise ValidationError("similarity diagonal must be 1")
        if m.min(initial=1.0) < -1.0 - 1e-12 or m.max(initial=-1.0) > 1.0 + 1e-12:
            raise ValidationError("similarity entries must lie in [-1, 1]")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "tasks", tuple(self.tasks))


def prediction_similarity(
    per_task_scores: Mapping[str, Sequence[float]],
    mode: str = "prediction-score",
) -> TaskSimilarity:
    """Correlate per-voxel score vectors between every pair of tasks.

    All vectors must cover the identical concatenated voxel set.
    """
    if mode not in ("prediction-score", "prediction-values"):
        raise ValidationError(f"mode must be a prediction mode, got {mode!r}")
    codes = list(per_task_scores)
    if not codes:
        raise EmptyInput("no tasks given")
    vectors = [np.asarray(per_task_scores[c], dtype=np.float64).ravel() for c in codes]
    lengths = {c: v.size for c, v in zip(codes, vectors)}
    if len(set(lengths.values())) > 1:
        raise LengthMismatch(f"score vectors differ in length: {lengths}")
    if vectors[0].size < 3:
        raise LengthMismatch(f"need score vectors of length >= 3, got {vectors[0].size}")
    return TaskSimilarity(tasks=tuple(codes), matrix=_pearson_matrix(np.vstack(vectors)), mode=mode)


def representation_similarity(
    per_task_features: Mapping[str, FeatureMatrix],
) -> TaskSimilarity:
    """RSA between tasks: correlate the upper triangles of each task's
    stimulus-by-stimulus correlation matrix.

    Dimension-agnostic and invariant to rotations of each embedding basis,
    so feature spaces of different width are directly comparable.
    """
    codes = list(per_task_features)
    if not codes:
        raise EmptyInput("no tasks given")
    ids = per_task_features[codes[0]].sample_ids
    if len(ids) < 3:
        raise MismatchedSamples(f"RSA needs >= 3 shared samples, got {len(ids)}")
    triangles = []
    iu = np.triu_indices(len(ids), k=1)
    for code in codes:
        fm = per_task_features[code]
        if fm.sample_ids != ids:
            raise MismatchedSamples(f"task {code} has a different sample set/order")
        corr = _pearson_matrix(fm.values)
        triangles.append(corr[iu])
    return TaskSimilarity(
        tasks=tuple(codes),
        matrix=_pearson_matrix(np.vstack(triangles)),
        mode="representation-rsa",
    )


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Binary merge tree; leaves are nodes 0..n-1, merge i creates node n+i."""

    leaves: tuple[str, ...]
    merges: tuple[Merge, ...]

    def __post_init__(self):
        n = len(self.leaves)
        if len(self.merges) != n - 1:
            raise ValidationError(f"{n} leaves require {n - 1} merges, got {len(self.merges)}")
        consumed = set()
        for i, m in enumerate(self.merges):
            for node in (m.left, m.right):
                if not (0 <= node < n + i):
                    raise ValidationError(f"merge {i} references unborn node {node}")
                if node in consumed:
                    raise ValidationError(f"node {node} consumed twice")
                consumed.add(node)

    def heights(self) -> list[float]:
        return [m.height for m in self.merges]


def cluster(similarity: TaskSimilarity, linkage: str = "average") -> Dendrogram:
    """Agglomerative clustering on distance 1 - similarity.

    Ties in the minimum distance are broken by the lexicographically smallest
    pair of smallest-contained-leaf indices, which makes the merge sequence
    deterministic regardless of task order perturbations among tied pairs.
    """
    if linkage not in LINKAGES:
        raise ValidationError(f"linkage must be one of {LINKAGES}, got {linkage!r}")
    n = len(similarity.tasks)
    if n < 2:
        raise EmptyInput(f"clustering needs >= 2 tasks, got {n}")
    dist = 1.0 - similarity.matrix
    # active cluster state: node id -> (representative leaf, size)
    rep = {i: i for i in range(n)}
    size = {i: 1 for i in range(n)}
    d = {}
    for i in range(n):
        for j in range(i + 1, n):
            d[(i, j)] = float(dist[i, j])
    merges = []
    active = set(range(n))
    next_node = n
    while len(active) > 1:
        best = None
        for a in active:
            for b in active:
                if a >= b:
                    continue
                key = (d[(a, b)], min(rep[a], rep[b]), max(rep[a], rep[b]))
                if best is None or key < best[0]:
                    best = (key, a, b)
        (_, a, b) = best
        height = d[(a, b)]
        left, right = (a, b) if rep[a] <= rep[b] else (b, a)
        new = next_node
        next_node += 1
        for c in active:
            if c in (a, b):
                continue
            da = d[(min(a, c), max(a, c))]
            db = d[(min(b, c), max(b, c))]
            if linkage == "average":
                dn = (size[a] * da + size[b] * db) / (size[a] + size[b])
            elif linkage == "complete":
                dn = max(da, db)
            else:
                dn = min(da, db)
            d[(min(new, c), max(new, c))] = dn
        rep[new] = min(rep[a], rep[b])
        size[new] = size[a] + size[b]
        active.discard(a)
        active.discard(b)
        active.add(new)
        merges.append(Merge(left=left, right=right, height=height, size=size[new]))
    return Dendrogram(leaves=similarity.tasks, merges=tuple(merges))


def _half_heights(dendro: Dendrogram) -> dict[int, float]:
    """Ultrametric layout: node drawn at height/2, leaves at 0."""
    n = len(dendro.leaves)
    half = {i: 0.0 for i in range(n)}
    for i, m in enumerate(dendro.merges):
        half[n + i] = m.height / 2.0
    return half


def _exact_branch(parent_half: float, child_half: float) -> float:
    """Branch length b with child_half + b == parent_half exactly in floats.

    parent_half - child_half can round; nudging by ulps guarantees the parsed
    tree reconstructs the original heights bit-for-bit.
    """
    b = parent_half - child_half
    for _ in range(4):
        got = child_half + b
        if got == parent_half:
            return b
        b = math.nextafter(b, math.inf if got < parent_half else -math.inf)
    return parent_half - child_half


def to_newick(dendro: Dendrogram) -> str:
    """Newick string with ultrametric branch lengths.

    A child hanging from a merge gets branch length parent_height/2 minus its
    own drawn height, so leaf-to-root depth equals root_height/2 everywhere.
    """
    n = len(dendro.leaves)
    half = _half_heights(dendro)

    def render(node: int, parent_half: float) -> str:
        length = _exact_branch(parent_half, half[node])
        if node < n:
            return f"{dendro.leaves[node]}:{length!r}"
        m = dendro.merges[node - n]
        return f"({render(m.left, half[node])},{render(m.right, half[node])}):{length!r}"

    root = n + len(dendro.merges) - 1
    m = dendro.merges[-1]
    return f"({render(m.left, half[root])},{render(m.right, half[root])});"


def parse_newick(text: str, leaf_order: Sequence[str] = None) -> Dendrogram:
    """Parse a Newick string written by :func:`to_newick` back into a tree.

    Heights are reconstructed from cumulative branch lengths (node height =
    2 x drawn depth below it). ``leaf_order`` fixes leaf index assignment;
    by default leaves are numbered in left-to-right appearance order.
    """
    text = text.strip()
    if not text.endswith(";"):
        raise ValidationError("Newick string must end with ';'")
    pos = 0

    def parse_node():
        nonlocal pos
        if text[pos] == "(":
            pos += 1
            left = parse_node()
            if text[pos] != ",":
                raise ValidationError(f"expected ',' at {pos}")
            pos += 1
            right = parse_node()
            if text[pos] != ")":
                raise ValidationError(f"expected ')' at {pos}")
            pos += 1
            length = _parse_length()
            return ("internal", left, right, length)
        m = re.match(r"[^(),;:]+", text[pos:])
        if not m:
            raise ValidationError(f"expected leaf label at {pos}")
        label = m.group(0)
        pos += len(label)
        return ("leaf", label, _parse_length())

    def _parse_length():
        nonlocal pos
        if pos < len(text) and text[pos] == ":":
            pos += 1
            m = re.match(r"[-+0-9.eE]+", text[pos:])
            if not m:
                raise ValidationError(f"expected branch length at {pos}")
            pos += len(m.group(0))
            return float(m.group(0))
        return 0.0

    tree = parse_node()
    if text[pos] != ";":
        raise ValidationError(f"expected ';' at {pos}")

    labels: list[str] = []

    def collect(node):
        if node[0] == "leaf":
            labels.append(node[1])
        else:
            collect(node[1])
            collect(node[2])

    collect(tree)
    if leaf_order is None:
        leaf_order = labels
    index = {lab: i for i, lab in enumerate(leaf_order)}
    if set(labels) != set(index):
        raise ValidationError("leaf labels do not match the expected leaf set")

    merges: list[tuple[float, int, int]] = []  # (height, left_node, right_node) placeholders

    def build(node):
        """Return (node_key, half_height); node_key resolved to ids later."""
        if node[0] == "leaf":
            return index[node[1]], 0.0
        lkey, lhalf = build(node[1])
        rkey, rhalf = build(node[2])
        llen = node[1][2] if node[1][0] == "leaf" else node[1][3]
        half = lhalf + llen
        merges.append((2.0 * half, lkey, rkey))
        return ("m", len(merges) - 1), half

    build(tree)
    n = len(leaf_order)
    order = sorted(range(len(merges)), key=lambda i: merges[i][0])
    new_id = {}
    resolved = []
    for rank, mi in enumerate(order):
        new_id[mi] = n + rank
    for rank, mi in enumerate(order):
        height, lkey, rkey = merges[mi]
        left = lkey if isinstance(lkey, int) else new_id[lkey[1]]
        right = rkey if isinstance(rkey, int) else new_id[rkey[1]]
        sub = _subtree_size(resolved, n, left) + _subtree_size(resolved, n, right)
        resolved.append(Merge(left=left, right=right, height=height, size=sub))
    return Dendrogram(leaves=tuple(leaf_order), merges=tuple(resolved))


def _subtree_size(resolved: list[Merge], n: int, node: int) -> int:
    if node < n:
        return 1
    return resolved[node - n].size


def dendrogram_to_json(dendro: Dendrogram) -> dict:
    return {
        "leaves": list(dendro.leaves),
        "merges": [
            {"left": m.left, "right": m.right, "height": m.height, "size": m.size}
            for m in dendro.merges
        ],
    }


def dendrogram_from_json(d: dict) -> Dendrogram:
    return Dendrogram(
        leaves=tuple(d["leaves"]),
        merges=tuple(
            Merge(int(m["left"]), int(m["right"]), float(m["height"]), int(m["size"]))
            for m in d["merges"]
        ),
    )


def similarity_csv(similarity: TaskSimilarity) -> str:
    """Full matrix CSV with task-code headers."""
    lines = ["," + ",".join(similarity.tasks)]
    for i, code in enumerate(similarity.tasks):
        lines.append(code + "," + ",".join(repr(float(v)) for v in similarity.matrix[i]))
    return "\n".join(lines) + "\n"


def export_heatmap(similarity: TaskSimilarity, csv_path, svg_path, title: str = "") -> None:
    """Write the similarity matrix as CSV and a labeled SVG heatmap."""
    if not similarity.tasks:
        raise EmptyInput("empty task list")
    try:
        Path(csv_path).write_text(similarity_csv(similarity), "utf-8")
        Path(svg_path).write_text(
            _svg.heatmap_svg(similarity.tasks, similarity.matrix, title=title), "utf-8"
        )
    except OSError as exc:
        raise IoError(str(exc)) from None


def _leaf_positions(dendro: Dendrogram) -> dict[int, float]:
    """x position of every node: leaves in traversal order, parents centered."""
    n = len(dendro.leaves)
    order: list[int] = []

    def walk(node: int):
        if node < n:
            order.append(node)
            return
        m = dendro.merges[node - n]
        walk(m.left)
        walk(m.right)

    walk(n + len(dendro.merges) - 1)
    pos = {leaf: float(i) for i, leaf in enumerate(order)}
    for i, m in enumerate(dendro.merges):
        pos[n + i] = (pos[m.left] + pos[m.right]) / 2.0
    return pos


def export_dendrogram(dendro: Dendrogram, newick_path, json_path, svg_path, title: str = "") -> None:
    """Write the merge tree as Newick, JSON and a drawn SVG."""
    if not dendro.leaves:
        raise EmptyInput("empty task list")
    n = len(dendro.leaves)
    pos = _leaf_positions(dendro)
    half = _half_heights(dendro)
    segments = []
    for i, m in enumerate(dendro.merges):
        segments.append(
            (pos[m.left], half[m.left], pos[m.right], half[m.right], half[n + i])
        )
    order = sorted(range(n), key=lambda leaf: pos[leaf])
    labels = [dendro.leaves[leaf] for leaf in order]
    max_h = max(half.values()) if half else 1.0
    try:
        Path(newick_path).write_text(to_newick(dendro) + "\n", "utf-8")
        Path(json_path).write_text(
            json.dumps(dendrogram_to_json(dendro), sort_keys=True, indent=2) + "\n", "utf-8"
        )
        Path(svg_path).write_text(
            _svg.dendrogram_svg(labels, segments, max_h, title=title), "utf-8"
        )
    except OSError as exc:
        raise IoError(str(exc)) from None
