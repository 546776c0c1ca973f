"""Accuracy-based metrics (UA / RA / TA), runtime, and the gap to Retrain."""

from __future__ import annotations

import logging
import time
from typing import Callable, TypeVar

import numpy as np

from app.core.errors import EmptySetError
from app.data.datasets import IdArray, LabeledDataset
from app.models.schema import GapReport, MetricsReport, MlpArchitecture
from app.nn.mlp import ParamVector, forward

logger = logging.getLogger(__name__)

T = TypeVar("T")

GAP_METRICS = ("ua", "ra", "ta", "mia")


def accuracy(
    arch: MlpArchitecture, params: ParamVector, ds: LabeledDataset, ids: IdArray
) -> float:
    """Percentage of *ids* whose argmax logit is the true label (ties → lowest class)."""
    idx = np.asarray(ids, dtype=np.int64)
    if idx.size == 0:
        raise EmptySetError("id set")
    features, labels = ds.rows(idx)
    predicted = np.argmax(forward(arch, params, features), axis=1)
    return 100.0 * float(np.count_nonzero(predicted == labels)) / idx.size


def compute_ua(
    arch: MlpArchitecture, params: ParamVector, ds: LabeledDataset, forget_ids: IdArray
) -> float:
    """Unlearning accuracy: 100 − accuracy on D_f."""
    if np.asarray(forget_ids).size == 0:
        raise EmptySetError("forget set")
    return 100.0 - accuracy(arch, params, ds, forget_ids)


def compute_ra(
    arch: MlpArchitecture, params: ParamVector, ds: LabeledDataset, retain_ids: IdArray
) -> float:
    if np.asarray(retain_ids).size == 0:
        raise EmptySetError("retain set")
    return accuracy(arch, params, ds, retain_ids)


def compute_ta(arch: MlpArchitecture, params: ParamVector, test_ds: LabeledDataset) -> float:
    if len(test_ds) == 0:
        raise EmptySetError("test set")
    return accuracy(arch, params, test_ds, test_ds.ids)


def avg_gap(report: MetricsReport, reference: MetricsReport) -> GapReport:
    """Absolute per-metric gaps over UA/RA/TA/MIA and their mean; RTE is excluded."""
    gaps = {
        name: abs(getattr(report, name) - getattr(reference, name)) for name in GAP_METRICS
    }
    return GapReport(
        method=report.method,
        reference_method=reference.method,
        seed=report.seed,
        ua_gap=gaps["ua"],
        ra_gap=gaps["ra"],
        ta_gap=gaps["ta"],
        mia_gap=gaps["mia"],
        avg_gap=sum(gaps.values()) / len(GAP_METRICS),
    )


# ---------------------------------------------------------------------------
# Runtime
# ---------------------------------------------------------------------------


def timed_call(fn: Callable[[], T]) -> tuple[T, float]:
    """Run *fn* and return (result, wall-clock seconds) on the monotonic clock."""
    start = time.perf_counter()
    result = fn()
    return result, max(0.0, time.perf_counter() - start)


def measure_rte(fn: Callable[[], object]) -> float:
    """Wall-clock seconds spent in *fn*."""
    _, seconds = timed_call(fn)
    return seconds

