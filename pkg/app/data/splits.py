"""Forget / retain splits for the random-data and class-wise scenarios."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from app.core.errors import EmptySetError, UnknownClassError
from app.data.datasets import IdArray, LabeledDataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RandomDataForgetting:
    fraction: float


@dataclass(frozen=True)
class ClassWiseForgetting:
    class_label: int


ForgetScenario = Union[RandomDataForgetting, ClassWiseForgetting, None]


@dataclass(frozen=True, eq=False)
class ForgetSplit:
    """D_f and D_r as sorted id arrays; together they cover the dataset exactly once."""

    forget_ids: IdArray
    retain_ids: IdArray
    scenario: ForgetScenario = field(default=None)

    def __post_init__(self) -> None:
        forget = np.sort(np.asarray(self.forget_ids, dtype=np.int64))
        retain = np.sort(np.asarray(self.retain_ids, dtype=np.int64))
        if np.intersect1d(forget, retain).size:
            raise ValueError("forget_ids and retain_ids overlap")
        forget.setflags(write=False)
        retain.setflags(write=False)
        object.__setattr__(self, "forget_ids", forget)
        object.__setattr__(self, "retain_ids", retain)

    @classmethod
    def from_forget_ids(
        cls, ds: LabeledDataset, forget_ids: IdArray, scenario: ForgetScenario = None
    ) -> "ForgetSplit":
        """Build the split whose retain side is D \\ D_f."""
        retain = np.setdiff1d(ds.ids, np.asarray(forget_ids, dtype=np.int64))
        return cls(forget_ids=forget_ids, retain_ids=retain, scenario=scenario)

    def covers(self, ds: LabeledDataset) -> bool:
        """True when D_f ∪ D_r is exactly the dataset's id set."""
        union = np.union1d(self.forget_ids, self.retain_ids)
        return bool(union.shape == ds.ids.shape and np.array_equal(union, ds.ids))


def forget_count(fraction: float, n: int) -> int:
    """|D_f| = fraction·n rounded half-up."""
    return int(math.floor(fraction * n + 0.5))


def split_random(ds: LabeledDataset, fraction: float, seed: int) -> ForgetSplit:
    """Forget a uniform random subset (without replacement) of size round(fraction·n)."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    n = len(ds)
    k = forget_count(fraction, n)
    if k == 0:
        raise EmptySetError(f"forget set (fraction {fraction} of {n} samples)")
    if k == n:
        raise EmptySetError(f"retain set (fraction {fraction} of {n} samples)")
    rng = np.random.default_rng(seed)
    forget = rng.choice(n, size=k, replace=False)
    logger.debug("Random split: %d forget / %d retain (seed %d)", k, n - k, seed)
    return ForgetSplit.from_forget_ids(ds, forget, RandomDataForgetting(fraction))


def split_classwise(ds: LabeledDataset, class_label: int) -> ForgetSplit:
    """Forget every sample carrying *class_label*."""
    mask = ds.labels == class_label
    if not mask.any():
        raise UnknownClassError(class_label)
    if mask.all():
        raise UnknownClassError(class_label, "is the only class; retain set would be empty")
    return ForgetSplit.from_forget_ids(
        ds, ds.ids[mask], ClassWiseForgetting(class_label)
    )
