"""Labeled datasets: synthetic blobs, CSV ingestion, row access.

A LabeledDataset is immutable after construction. Sample ids are the row
positions 0…n−1; every consumer reads rows through ``rows(ids)`` so that
restricted views (D_r, D_f) never touch rows outside the requested ids.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from app.core.errors import (
    DataFormatError,
    DimensionMismatchError,
    EmptySetError,
    LabelRangeError,
)

logger = logging.getLogger(__name__)

IdArray = NDArray[np.int64]


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature matrix + integer labels; ids are 0…n−1 in row order."""

    features: NDArray[np.float64]
    labels: NDArray[np.int64]
    n_classes: int
    ids: IdArray = field(init=False)

    def __post_init__(self) -> None:
        features = np.array(self.features, dtype=np.float64, copy=True)
        labels = np.array(self.labels, dtype=np.int64, copy=True).reshape(-1)
        if features.ndim != 2:
            raise DimensionMismatchError("features ndim", 2, features.ndim)
        if features.shape[0] != labels.shape[0]:
            raise DimensionMismatchError("label count", features.shape[0], labels.shape[0])
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_classes):
            bad = labels[(labels < 0) | (labels >= self.n_classes)][0]
            raise LabelRangeError(int(bad), self.n_classes)
        features.setflags(write=False)
        labels.setflags(write=False)
        ids = np.arange(labels.shape[0], dtype=np.int64)
        ids.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ids", ids)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def rows(self, ids: IdArray) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
        """Features and labels of *ids*, in the order given."""
        idx = np.asarray(ids, dtype=np.int64)
        return self.features[idx], self.labels[idx]

    def restrict(self, ids: IdArray) -> "LabeledDataset":
        """A new dataset holding only *ids* (re-numbered 0…k−1, order kept)."""
        features, labels = self.rows(ids)
        return LabeledDataset(features=features, labels=labels, n_classes=self.n_classes)


# ---------------------------------------------------------------------------
# Synthetic data
# ---------------------------------------------------------------------------


def class_means(n_classes: int, n_features: int) -> NDArray[np.float64]:
    """Deterministic class centres at radius 1.

    Two or more features: evenly spaced on the unit circle spanned by the
    first two coordinates. One feature: evenly spaced over [-1, 1].
    """
    means = np.zeros((n_classes, n_features), dtype=np.float64)
    if n_features == 1:
        means[:, 0] = np.linspace(-1.0, 1.0, n_classes) if n_classes > 1 else 0.0
        return means
    angles = 2.0 * math.pi * np.arange(n_classes) / n_classes
    means[:, 0] = np.cos(angles)
    means[:, 1] = np.sin(angles)
    return means


def make_blobs(
    n_per_class: int,
    n_classes: int,
    n_features: int,
    spread: float,
    seed: int,
) -> LabeledDataset:
    """Isotropic Gaussian clusters around ``class_means``; class-major row order."""
    if n_per_class <= 0 or n_classes <= 0 or n_features <= 0:
        raise ValueError("n_per_class, n_classes and n_features must be positive")
    rng = np.random.default_rng(seed)
    means = class_means(n_classes, n_features)
    noise = rng.standard_normal((n_classes * n_per_class, n_features))
    labels = np.repeat(np.arange(n_classes, dtype=np.int64), n_per_class)
    features = means[labels] + spread * noise
    return LabeledDataset(features=features, labels=labels, n_classes=n_classes)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def load_csv(path: Union[str, Path], header: bool = False) -> LabeledDataset:
    """Read a comma-separated file whose last column is the integer label.

    Row order becomes the id order. The class count is max label + 1.
    Row numbers in errors are 1-based file lines; columns are 1-based.
    """
    path = str(path)
    try:
        frame = pd.read_csv(
            path,
            header=0 if header else None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
        )
    except pd.errors.ParserError as exc:
        raise DataFormatError(path, f"inconsistent column count ({exc})") from exc
    except pd.errors.EmptyDataError as exc:
        raise DataFormatError(path, "file is empty") from exc

    if frame.shape[0] == 0:
        raise EmptySetError(f"dataset {path}")
    if frame.shape[1] < 2:
        raise DataFormatError(path, "need at least one feature column and a label column")

    first_line = 2 if header else 1
    values = np.empty(frame.shape, dtype=np.float64)
    for col in range(frame.shape[1]):
        cells = frame.iloc[:, col]
        numeric = pd.to_numeric(cells, errors="coerce")
        bad = numeric.isna().to_numpy()
        if bad.any():
            row = int(np.argmax(bad))
            raw = cells.iloc[row]
            missing = pd.isna(raw) or raw == ""
            detail = "missing value" if missing else f"non-numeric value {raw!r}"
            raise DataFormatError(path, detail, row=first_line + row, column=col + 1)
        # to_numeric is not correctly rounded; reparse the validated strings.
        values[:, col] = np.fromiter(map(float, cells), dtype=np.float64, count=len(cells))

    raw_labels = values[:, -1]
    non_integer = (raw_labels != np.round(raw_labels)) | (raw_labels < 0)
    if non_integer.any():
        row = int(np.argmax(non_integer))
        raise DataFormatError(
            path,
            f"label {frame.iloc[row, -1]!r} is not a non-negative integer",
            row=first_line + row,
            column=frame.shape[1],
        )
    labels = raw_labels.astype(np.int64)
    logger.info(
        "Loaded %d rows x %d features from %s", len(labels), values.shape[1] - 1, path
    )
    return LabeledDataset(
        features=values[:, :-1], labels=labels, n_classes=int(labels.max()) + 1
    )


def save_csv(
    ds: LabeledDataset, path: Union[str, Path], header: bool = False
) -> Path:
    """Write *ds* in the format ``load_csv`` reads (17 significant digits)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(ds.features, columns=[f"x{i}" for i in range(ds.n_features)])
    frame["label"] = ds.labels
    frame.to_csv(path, index=False, header=header, float_format="%.17g")
    logger.info("Wrote %s", path)
    return path
