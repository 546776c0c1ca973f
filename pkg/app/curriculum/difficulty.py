"""Per-sample forgetting difficulty, scored once against the trained model."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from app.core.errors import DimensionMismatchError, EmptySetError
from app.data.datasets import IdArray, LabeledDataset
from app.models.schema import DifficultyMeasure, MlpArchitecture
from app.nn.mlp import ParamVector, per_sample_loss, predict_proba

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DifficultyScores:
    """One finite score per forget id; ``ids[i]`` is scored by ``scores[i]``."""

    ids: IdArray
    scores: NDArray[np.float64]

    def __post_init__(self) -> None:
        ids = np.array(self.ids, dtype=np.int64, copy=True).reshape(-1)
        scores = np.array(self.scores, dtype=np.float64, copy=True).reshape(-1)
        if ids.shape != scores.shape:
            raise DimensionMismatchError("score count", ids.shape[0], scores.shape[0])
        if np.unique(ids).size != ids.size:
            raise ValueError("duplicate ids in difficulty scores")
        if not np.all(np.isfinite(scores)):
            raise ValueError("difficulty scores must be finite")
        ids.setflags(write=False)
        scores.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "scores", scores)

    def __len__(self) -> int:
        return int(self.ids.shape[0])

    def as_dict(self) -> dict[int, float]:
        return {int(i): float(s) for i, s in zip(self.ids, self.scores)}


def difficulty_scores(
    arch: MlpArchitecture,
    params_star: ParamVector,
    ds: LabeledDataset,
    forget_ids: IdArray,
    measure: DifficultyMeasure = DifficultyMeasure.CONFIDENCE,
) -> DifficultyScores:
    """Score D_f in one inference pass over θ_D*.

    confidence: softmax probability of the true class (low = easy to forget).
    loss: per-sample cross-entropy.
    """
    ids = np.sort(np.asarray(forget_ids, dtype=np.int64))
    if ids.size == 0:
        raise EmptySetError("forget set")
    features, labels = ds.rows(ids)
    if measure == DifficultyMeasure.CONFIDENCE:
        proba = predict_proba(arch, params_star, features)
        scores = proba[np.arange(labels.shape[0]), labels]
    else:
        scores = per_sample_loss(arch, params_star, features, labels)
    logger.debug(
        "Scored %d forget samples by %s: min %.4f max %.4f",
        ids.size,
        measure.value,
        float(scores.min()),
        float(scores.max()),
    )
    return DifficultyScores(ids=ids, scores=scores)
