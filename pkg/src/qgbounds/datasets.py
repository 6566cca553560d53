"""Dataset ingestion, PCA reduction, and feature scaling.

Two CSV datasets ship with the package: the 150-row iris table
(sepal_length,sepal_width,petal_length,petal_width,class with class in
{0,1,2}) and the 8x8 handwritten-digits table (p0..p63,label with pixel
values in 0..16 and label in 0..9).  Loaders keep only the two-class binary
problem and map the kept classes to labels {-1, +1}.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError

IRIS_HEADER = ["sepal_length", "sepal_width", "petal_length", "petal_width", "class"]
DIGITS_HEADER = [f"p{i}" for i in range(64)] + ["label"]

__all__ = [
    "Dataset",
    "bundled_path",
    "load_iris",
    "load_digits",
    "pca_reduce",
    "scale_features",
    "fit_feature_scaler",
    "apply_feature_scaler",
    "stratified_split",
]


@dataclass(frozen=True)
class Dataset:
    name: str
    features: np.ndarray  # (N, m)
    labels: np.ndarray  # (N,) in {-1, +1}

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("feature and label row counts must match")
        if not np.all(np.isin(self.labels, (-1, 1))):
            raise ValueError("labels must be -1 or +1")


def bundled_path(name: str) -> Path:
    """Filesystem path of a CSV shipped inside the package."""
    return Path(str(resources.files("qgbounds").joinpath(f"data/{name}")))


def _read_rows(path, header: list[str]) -> list[tuple[int, list[str]]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(text.splitlines())
    try:
        got = next(reader)
    except StopIteration:
        raise DataError(f"{path}: empty file") from None
    if [h.strip() for h in got] != header:
        raise DataError(f"{path}, line 1: expected header {','.join(header)}")
    rows = [(i, row) for i, row in enumerate(reader, start=2) if row]
    if not rows:
        raise DataError(f"{path}: empty dataset (header only)")
    return rows


def load_iris(path=None) -> Dataset:
    """Iris rows of classes 0 and 1 only, labels mapped {0 -> -1, 1 -> +1}."""
    path = bundled_path("iris.csv") if path is None else Path(path)
    feats, labels, seen = [], [], set()
    for lineno, row in _read_rows(path, IRIS_HEADER):
        if len(row) != 5:
            raise DataError(f"{path}, line {lineno}: expected 5 fields, got {len(row)}")
        try:
            values = [float(v) for v in row[:4]]
            cls = int(row[4])
        except ValueError as exc:
            raise DataError(f"{path}, line {lineno}: {exc}") from exc
        if cls not in (0, 1, 2):
            raise DataError(f"{path}, line {lineno}: class must be 0, 1, or 2, got {cls}")
        if cls in (0, 1):
            seen.add(cls)
            feats.append(values)
            labels.append(-1 if cls == 0 else 1)
    if seen != {0, 1}:
        raise DataError(f"{path}: need rows of both class 0 and class 1, found {sorted(seen)}")
    return Dataset("iris", np.array(feats), np.array(labels))


def load_digits(path=None) -> Dataset:
    """Digit rows with label 0 or 1 only, mapped {0 -> -1, 1 -> +1}; 64 pixel features."""
    path = bundled_path("digits.csv") if path is None else Path(path)
    feats, labels, seen = [], [], set()
    for lineno, row in _read_rows(path, DIGITS_HEADER):
        if len(row) != 65:
            raise DataError(f"{path}, line {lineno}: expected 65 fields, got {len(row)}")
        try:
            values = [int(v) for v in row[:64]]
            label = int(row[64])
        except ValueError as exc:
            raise DataError(f"{path}, line {lineno}: {exc}") from exc
        if any(not 0 <= v <= 16 for v in values):
            raise DataError(f"{path}, line {lineno}: pixel values must lie in 0..16")
        if not 0 <= label <= 9:
            raise DataError(f"{path}, line {lineno}: label must lie in 0..9, got {label}")
        if label in (0, 1):
            seen.add(label)
            feats.append(values)
            labels.append(-1 if label == 0 else 1)
    if seen != {0, 1}:
        raise DataError(f"{path}: need rows of both digit 0 and digit 1, found {sorted(seen)}")
    return Dataset("digits", np.array(feats, dtype=float), np.array(labels))


def pca_reduce(features: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Project mean-centered data onto the top-k principal components.

    Returns (projected, projection, mean) where projection columns are
    orthonormal components in descending variance order, each with its
    largest-magnitude entry made positive.
    """
    features = np.asarray(features, dtype=float)
    if features.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {features.shape}")
    if not 1 <= k <= min(features.shape):
        raise ValueError(f"k must lie in 1..{min(features.shape)}, got {k}")
    mean = features.mean(axis=0)
    centered = features - mean
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    projection = vt[:k].T.copy()
    for col in range(k):
        pivot = int(np.argmax(np.abs(projection[:, col])))
        if projection[pivot, col] < 0:
            projection[:, col] = -projection[:, col]
    return centered @ projection, projection, mean


def scale_features(features: np.ndarray, target: tuple[float, float] = (0.0, np.pi)) -> np.ndarray:
    """Per-column min-max scaling onto [lo, hi]; constant columns map to lo."""
    lo, span = fit_feature_scaler(features, target)
    return apply_feature_scaler(features, lo, span, target, clip=False)


def fit_feature_scaler(
    features: np.ndarray, target: tuple[float, float] = (0.0, np.pi)
) -> tuple[np.ndarray, np.ndarray]:
    """Column minima and ranges for min-max scaling; zero range marks a constant column."""
    features = np.asarray(features, dtype=float)
    col_min = features.min(axis=0)
    col_span = features.max(axis=0) - col_min
    return col_min, col_span


def apply_feature_scaler(
    features: np.ndarray,
    col_min: np.ndarray,
    col_span: np.ndarray,
    target: tuple[float, float] = (0.0, np.pi),
    clip: bool = True,
) -> np.ndarray:
    """Apply a fitted min-max scaler; out-of-range values are clipped when asked."""
    features = np.asarray(features, dtype=float)
    lo, hi = target
    safe = np.where(col_span > 0, col_span, 1.0)
    scaled = lo + (features - col_min) / safe * (hi - lo)
    scaled = np.where(col_span > 0, scaled, lo)
    if clip:
        scaled = np.clip(scaled, lo, hi)
    return scaled


def stratified_split(
    dataset: Dataset, n_train: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Indices (train, test): n_train rows balanced across the two labels, rest test.

    Half the budget goes to each label (the odd remainder to label -1); the
    test set is every remaining row.
    """
    labels = dataset.labels
    if not 2 <= n_train < labels.size:
        raise ValueError(f"n_train must lie in 2..{labels.size - 1}, got {n_train}")
    per = {-1: n_train // 2 + n_train % 2, 1: n_train // 2}
    train_parts = []
    for label, want in per.items():
        idx = np.flatnonzero(labels == label)
        if idx.size < want:
            raise ValueError(f"not enough rows of label {label}: need {want}, have {idx.size}")
        train_parts.append(rng.permutation(idx)[:want])
    train_idx = np.sort(np.concatenate(train_parts))
    mask = np.ones(labels.size, dtype=bool)
    mask[train_idx] = False
    return train_idx, np.flatnonzero(mask)
