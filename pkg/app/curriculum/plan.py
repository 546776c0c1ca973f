"""Curriculum plans: ordered, disjoint criteria covering the forget set.

A plan sorts D_f by difficulty (ascending score, ties by ascending id) and
slices the queue into n criteria. Every plan satisfies two conditions:

  * the criteria are pairwise disjoint and their union is D_f;
  * the per-criterion mean score never decreases from one criterion to the next.

Plans are exported as JSON documents::

    {"criteria": [[id, ...], ...], "mean_scores": [...],
     "measure": "confidence", "strategy": "equal_size"}
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Optional, Union

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from app.core.errors import InvalidPlanError
from app.curriculum.difficulty import DifficultyScores
from app.data.datasets import IdArray
from app.models.schema import DifficultyMeasure, SliceStrategy
from app.models.validators import PLAN_SCHEMA, validate_document

logger = logging.getLogger(__name__)

# Relative slack for the mean-score ordering check (means of tied scores may
# differ in the last bits depending on summation order).
MEAN_SCORE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class CurriculumPlan:
    """Criteria D_f^1 … D_f^n, easiest first, each stored in ascending id order."""

    criteria: list[IdArray]
    mean_scores: list[float]
    measure: DifficultyMeasure = DifficultyMeasure.CONFIDENCE
    strategy: SliceStrategy = SliceStrategy.EQUAL_SIZE

    def __len__(self) -> int:
        return len(self.criteria)

    @property
    def sizes(self) -> list[int]:
        return [int(c.size) for c in self.criteria]


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def _equal_size_bounds(m: int, n: int) -> list[int]:
    base, remainder = divmod(m, n)
    sizes = [base + 1 if i < remainder else base for i in range(n)]
    return np.cumsum(sizes)[:-1].tolist()


def _quantile_bounds(sorted_scores: NDArray[np.float64], n: int) -> list[int]:
    cuts = np.quantile(sorted_scores, [i / n for i in range(1, n)])
    # Bin i holds scores in (cut_{i-1}, cut_i]; the first bin is closed on the left.
    return np.searchsorted(sorted_scores, cuts, side="right").tolist()


def build_plan(
    scores: DifficultyScores,
    n: int,
    strategy: SliceStrategy = SliceStrategy.EQUAL_SIZE,
    measure: DifficultyMeasure = DifficultyMeasure.CONFIDENCE,
) -> CurriculumPlan:
    """Slice the ascending difficulty queue into *n* criteria.

    equal_size: contiguous chunks of ⌊m/n⌋, the remainder going one each to
    the earliest chunks. quantile: cuts at the score quantiles i/n; a cut that
    leaves a criterion empty raises InvalidPlanError.
    """
    m = len(scores)
    if not 1 <= n <= m:
        raise InvalidPlanError([f"n_criteria must be in [1, {m}], got {n}"])

    order = np.lexsort((scores.ids, scores.scores))
    sorted_ids = scores.ids[order]
    sorted_scores = scores.scores[order]

    if strategy == SliceStrategy.EQUAL_SIZE:
        bounds = _equal_size_bounds(m, n)
    else:
        bounds = _quantile_bounds(sorted_scores, n)

    id_chunks = np.split(sorted_ids, bounds)
    score_chunks = np.split(sorted_scores, bounds)
    empty = [i for i, chunk in enumerate(id_chunks) if chunk.size == 0]
    if empty:
        raise InvalidPlanError(
            [f"criterion {i} is empty under {strategy.value} slicing" for i in empty]
        )

    criteria = [np.sort(chunk) for chunk in id_chunks]
    for c in criteria:
        c.setflags(write=False)
    plan = CurriculumPlan(
        criteria=criteria,
        mean_scores=[float(chunk.mean()) for chunk in score_chunks],
        measure=measure,
        strategy=strategy,
    )
    logger.debug(
        "Built %s plan with %d criteria (sizes %s)", strategy.value, n, plan.sizes
    )
    return plan


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_plan(
    plan: CurriculumPlan,
    forget_ids: IdArray,
    scores: Optional[DifficultyScores] = None,
) -> list[str]:
    """List every violated plan condition; an empty list means the plan is valid.

    When *scores* is given the per-criterion means are recomputed from it
    instead of trusting ``plan.mean_scores``.
    """
    violations: list[str] = []
    forget = {int(i) for i in np.asarray(forget_ids).reshape(-1)}

    owner: dict[int, int] = {}
    for index, criterion in enumerate(plan.criteria):
        if criterion.size == 0:
            violations.append(f"criterion {index} is empty")
        for raw in criterion:
            i = int(raw)
            if i in owner:
                violations.append(f"id {i} appears in criteria {owner[i]} and {index}")
            else:
                owner[i] = index

    for i in sorted(forget - owner.keys()):
        violations.append(f"id {i} of the forget set is missing from the plan")
    for i in sorted(owner.keys() - forget):
        violations.append(f"id {i} is not in the forget set")

    if scores is not None:
        lookup = scores.as_dict()
        means = []
        for criterion in plan.criteria:
            values = [lookup[int(i)] for i in criterion if int(i) in lookup]
            means.append(float(np.mean(values)) if values else float("nan"))
    else:
        means = list(plan.mean_scores)
        if len(means) != len(plan.criteria):
            violations.append(
                f"{len(means)} mean scores for {len(plan.criteria)} criteria"
            )
            return violations

    for index, (current, following) in enumerate(zip(means, means[1:])):
        slack = MEAN_SCORE_RTOL * max(1.0, abs(current), abs(following))
        if current > following + slack:
            violations.append(
                f"mean score decreases from criterion {index} ({current:.6g}) "
                f"to criterion {index + 1} ({following:.6g})"
            )
    return violations


# ---------------------------------------------------------------------------
# Histogram export
# ---------------------------------------------------------------------------


def export_score_histogram(
    scores: Union[DifficultyScores, NDArray[np.float64]], bins: int
) -> pd.DataFrame:
    """Counts over *bins* equal-width bins spanning [min, max].

    Bins are right-closed, (left, right], except the first which also holds
    the minimum. All-equal scores land in the first bin.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    values = scores.scores if isinstance(scores, DifficultyScores) else np.asarray(scores)
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if values.size == 0:
        return pd.DataFrame(columns=["bin_left", "bin_right", "count"])
    edges = np.linspace(values.min(), values.max(), bins + 1)
    index = np.clip(np.searchsorted(edges, values, side="left") - 1, 0, bins - 1)
    counts = np.bincount(index, minlength=bins)
    return pd.DataFrame(
        {"bin_left": edges[:-1], "bin_right": edges[1:], "count": counts.astype(np.int64)}
    )


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------


def plan_to_document(plan: CurriculumPlan) -> dict[str, Any]:
    return {
        "criteria": [[int(i) for i in c] for c in plan.criteria],
        "mean_scores": [float(s) for s in plan.mean_scores],
        "measure": plan.measure.value,
        "strategy": plan.strategy.value,
    }


def plan_from_document(document: Any) -> CurriculumPlan:
    """Rebuild a plan from its JSON document; schema violations raise InvalidPlanError."""
    errors = validate_document(document, PLAN_SCHEMA)
    if errors:
        raise InvalidPlanError(errors)
    criteria = []
    for ids in document["criteria"]:
        arr = np.sort(np.asarray(ids, dtype=np.int64))
        arr.setflags(write=False)
        criteria.append(arr)
    return CurriculumPlan(
        criteria=criteria,
        mean_scores=[float(s) for s in document["mean_scores"]],
        measure=DifficultyMeasure(document["measure"]),
        strategy=SliceStrategy(document["strategy"]),
    )
