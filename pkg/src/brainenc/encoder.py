"""Cross-validated ridge encoders.

One encoding run fits, per fold, the exact closed-form minimizer of

    ||Y - XW - 1 b^T||^2 + lambda ||W||^2

on the training fold (features and responses optionally z-scored with
training-fold statistics), predicts the held-out fold, and assembles the
out-of-fold prediction matrix. The Gram matrix (Xc^T Xc + lambda I) is
factorized once per fold and reused for every voxel column, which is what
makes wide response matrices (tens of thousands of voxels) cheap.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from . import io as bio
from .errors import (
    InvalidK,
    IoError,
    MissingUpstream,
    NonFiniteValues,
    ShapeMismatch,
    SingularSystem,
    ValidationError,
)
from .types import (
    EncodingConfig,
    FoldAssignment,
    PairedDataset,
    RoiSpec,
    TaskId,
)


def assign_folds(n_samples: int, k: int, scheme: str = "contiguous", seed: int = 0) -> FoldAssignment:
    """Split ``[0, n)`` into k folds.

    Contiguous (the default) produces k consecutive blocks in presentation
    order whose sizes differ by at most one, with the first ``n mod k`` folds
    one sample larger. The shuffled scheme applies a seeded permutation
    before blocking.
    """
    if not (2 <= k <= n_samples):
        raise InvalidK(f"need 2 <= k <= n_samples, got k={k}, n_samples={n_samples}")
    base, extra = divmod(n_samples, k)
    sizes = np.full(k, base, dtype=np.int64)
    sizes[:extra] += 1
    blocks = np.repeat(np.arange(k, dtype=np.int64), sizes)
    if scheme == "contiguous":
        fold_of_sample = blocks
    elif scheme == "shuffled":
        perm = np.random.default_rng(seed).permutation(n_samples)
        fold_of_sample = np.empty(n_samples, dtype=np.int64)
        fold_of_sample[perm] = blocks
    else:
        raise ValidationError(f"unknown fold scheme {scheme!r}")
    return FoldAssignment(n_samples=n_samples, k=k, fold_of_sample=fold_of_sample)


def _gram_solver(A: np.ndarray, lam: float):
    """Return a solve(B) callable for A = Xc^T Xc + lam I.

    Prefers a Cholesky factorization; if that fails with lam > 0 (extreme
    ill-conditioning) falls back to a singular-value solve, and with lam = 0
    the system is genuinely singular and is reported as such.
    """
    try:
        c_and_lower = scipy.linalg.cho_factor(A, check_finite=False)
    except scipy.linalg.LinAlgError:
        if lam == 0.0:
            raise SingularSystem(
                "lambda = 0 with a rank-deficient design matrix has no unique solution"
            ) from None
        return lambda B: np.linalg.lstsq(A, B, rcond=None)[0]
    return lambda B: scipy.linalg.cho_solve(c_and_lower, B, check_finite=False)


def fit_ridge(X: np.ndarray, Y: np.ndarray, lam: float, center: bool = True):
    """Closed-form ridge fit; returns (weights dim x voxels, intercept voxels).

    Weights solve (Xc^T Xc + lam I) W = Xc^T Yc on column-centered data;
    the penalty applies to the weights only, never the intercept.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2:
        raise ShapeMismatch(f"X and Y must be 2-D, got {X.shape} and {Y.shape}")
    if X.shape[0] != Y.shape[0]:
        raise ShapeMismatch(f"row counts differ: X has {X.shape[0]}, Y has {Y.shape[0]}")
    if not (np.isfinite(X).all() and np.isfinite(Y).all()):
        raise NonFiniteValues("fit_ridge inputs contain NaN or Inf")
    if lam < 0:
        raise ValidationError(f"lambda must be >= 0, got {lam}")
    n, dim = X.shape
    if lam == 0.0 and dim > n:
        raise SingularSystem(
            f"lambda = 0 needs dim <= samples, got dim={dim} > n={n}"
        )
    if center:
        xm = X.mean(axis=0)
        ym = Y.mean(axis=0)
        Xc = X - xm
        Yc = Y - ym
    else:
        Xc, Yc = X, Y
    A = Xc.T @ Xc
    A[np.diag_indices_from(A)] += lam
    W = _gram_solver(A, lam)(Xc.T @ Yc)
    if center:
        intercept = ym - xm @ W
    else:
        intercept = np.zeros(Y.shape[1])
    return W, intercept


@dataclass(frozen=True)
class StandardizationParams:
    """Train-fold feature/response means and stds used around one fold's fit.

    Zero-variance columns get std substituted with 1 so they pass through
    unchanged in both directions.
    """

    feature_mean: np.ndarray
    feature_std: np.ndarray
    response_mean: np.ndarray
    response_std: np.ndarray

    @classmethod
    def identity(cls, dim: int, voxels: int) -> "StandardizationParams":
        return cls(
            feature_mean=np.zeros(dim),
            feature_std=np.ones(dim),
            response_mean=np.zeros(voxels),
            response_std=np.ones(voxels),
        )

    @classmethod
    def from_training_fold(cls, X_tr: np.ndarray, Y_tr: np.ndarray) -> "StandardizationParams":
        fs = X_tr.std(axis=0)
        rs = Y_tr.std(axis=0)
        fs = np.where(fs == 0.0, 1.0, fs)
        rs = np.where(rs == 0.0, 1.0, rs)
        return cls(
            feature_mean=X_tr.mean(axis=0),
            feature_std=fs,
            response_mean=Y_tr.mean(axis=0),
            response_std=rs,
        )

    def scale_features(self, X: np.ndarray) -> np.ndarray:
        return (X - self.feature_mean) / self.feature_std

    def scale_responses(self, Y: np.ndarray) -> np.ndarray:
        return (Y - self.response_mean) / self.response_std

    def unscale_responses(self, Ys: np.ndarray) -> np.ndarray:
        return Ys * self.response_std + self.response_mean


@dataclass(frozen=True)
class RidgeModel:
    """One fold's fitted weights in standardized space."""

    weights: np.ndarray
    intercept: np.ndarray
    lam: float
    standardization: StandardizationParams
    fold_id: int

    def predict(self, X_raw: np.ndarray) -> np.ndarray:
        """Predict responses in original (de-standardized) units."""
        Xs = self.standardization.scale_features(np.asarray(X_raw, dtype=np.float64))
        return self.standardization.unscale_responses(Xs @ self.weights + self.intercept)


@dataclass(frozen=True)
class EncodingRun:
    """Fold-wise models plus the assembled out-of-fold prediction matrix."""

    task: TaskId
    subject_id: str
    roi: RoiSpec
    config: EncodingConfig
    folds: FoldAssignment
    models: tuple[RidgeModel, ...]
    predictions: np.ndarray


class FoldwiseRidge:
    """Per-fold feature preprocessing and Gram factorization for one X.

    Constructing this once per feature matrix and calling :meth:`encode` for
    many response matrices shares the expensive dim x dim factorizations
    across every (subject, ROI) using the same task features.
    """

    def __init__(self, X: np.ndarray, folds: FoldAssignment, config: EncodingConfig):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] != folds.n_samples:
            raise ShapeMismatch(
                f"X has {X.shape[0]} rows, fold assignment covers {folds.n_samples}"
            )
        n, dim = X.shape
        self.folds = folds
        self.config = config
        self.dim = dim
        self._per_fold = []
        for f in range(folds.k):
            tr = folds.train_indices(f)
            te = folds.test_indices(f)
            X_tr = X[tr]
            if config.lam == 0.0 and dim > len(tr):
                raise SingularSystem(
                    f"lambda = 0 needs dim <= training samples, got dim={dim}, "
                    f"fold {f} trains on {len(tr)}"
                )
            if config.standardize == "zscore":
                fm = X_tr.mean(axis=0)
                fs = X_tr.std(axis=0)
                fs = np.where(fs == 0.0, 1.0, fs)
            else:
                fm = np.zeros(dim)
                fs = np.ones(dim)
            Xs_tr = (X_tr - fm) / fs
            xs_mean = Xs_tr.mean(axis=0)
            Xc = Xs_tr - xs_mean
            A = Xc.T @ Xc
            A[np.diag_indices_from(A)] += config.lam
            self._per_fold.append(
                {
                    "train": tr,
                    "test": te,
                    "fm": fm,
                    "fs": fs,
                    "xs_mean": xs_mean,
                    "Xc": Xc,
                    "solve": _gram_solver(A, config.lam),
                    "Xs_te": (X[te] - fm) / fs,
                }
            )

    def encode(self, Y: np.ndarray):
        """Fit all folds against Y; returns (models, out-of-fold predictions)."""
        Y = np.asarray(Y, dtype=np.float64)
        if Y.shape[0] != self.folds.n_samples:
            raise ShapeMismatch(
                f"Y has {Y.shape[0]} rows, fold assignment covers {self.folds.n_samples}"
            )
        voxels = Y.shape[1]
        predictions = np.zeros((self.folds.n_samples, voxels))
        models = []
        for f, fold in enumerate(self._per_fold):
            Y_tr = Y[fold["train"]]
            if self.config.standardize == "zscore":
                rm = Y_tr.mean(axis=0)
                rs = Y_tr.std(axis=0)
                rs = np.where(rs == 0.0, 1.0, rs)
            else:
                rm = np.zeros(voxels)
                rs = np.ones(voxels)
            Ys_tr = (Y_tr - rm) / rs
            ys_mean = Ys_tr.mean(axis=0)
            Yc = Ys_tr - ys_mean
            W = fold["solve"](fold["Xc"].T @ Yc)
            intercept = ys_mean - fold["xs_mean"] @ W
            params = StandardizationParams(
                feature_mean=fold["fm"],
                feature_std=fold["fs"],
                response_mean=rm,
                response_std=rs,
            )
            models.append(
                RidgeModel(
                    weights=W,
                    intercept=intercept,
                    lam=self.config.lam,
                    standardization=params,
                    fold_id=f,
                )
            )
            predictions[fold["test"]] = (fold["Xs_te"] @ W + intercept) * rs + rm
        return tuple(models), predictions


def run_encoding(pair: PairedDataset, config: EncodingConfig) -> EncodingRun:
    """Cross-validated encode of one (task, subject, ROI) pair."""
    folds = assign_folds(pair.n_samples, config.k_folds, config.fold_scheme, config.seed)
    solver = FoldwiseRidge(pair.X, folds, config)
    models, predictions = solver.encode(pair.Y)
    return EncodingRun(
        task=pair.features.task,
        subject_id=pair.responses.subject_id,
        roi=pair.responses.roi,
        config=config,
        folds=folds,
        models=models,
        predictions=predictions,
    )


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def save_run(run: EncodingRun, out_dir, input_digests: dict = None, save_weights: bool = False) -> None:
    """Persist predictions (and optionally fold weights) plus a JSON sidecar."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out_dir}: {exc}") from None
    bio.write_array(run.predictions, out_dir / "predictions.npy")
    if save_weights:
        for model in run.models:
            bio.write_array(model.weights, out_dir / f"weights_fold{model.fold_id}.npy")
            bio.write_array(
                model.intercept.reshape(1, -1), out_dir / f"intercept_fold{model.fold_id}.npy"
            )
    sidecar = {
        "task": run.task.code,
        "subject": run.subject_id,
        "roi": run.roi.to_json(),
        "config": run.config.to_json(),
        "folds": run.folds.to_json(),
        "n_samples": int(run.predictions.shape[0]),
        "n_voxels": int(run.predictions.shape[1]),
        "inputs": input_digests or {},
        "tool": "brainenc 0.1.0",
    }
    (out_dir / "run.json").write_text(json.dumps(sidecar, sort_keys=True, indent=2) + "\n", "utf-8")


def load_run_sidecar(run_dir) -> dict:
    meta = Path(run_dir) / "run.json"
    if not meta.is_file():
        raise MissingUpstream(f"no encoding run at {run_dir}; run `brainenc encode` first")
    return json.loads(meta.read_text("utf-8"))


def load_run_predictions(run_dir) -> np.ndarray:
    pred = Path(run_dir) / "predictions.npy"
    if not pred.is_file():
        raise MissingUpstream(f"no predictions at {pred}; run `brainenc encode` first")
    return bio.read_array(pred)
