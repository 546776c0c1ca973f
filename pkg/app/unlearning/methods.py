"""Unlearning procedures: FT, GA, UFG and curriculum-driven CUFG.

All methods start from the trained weights θ_D* (``params0``), are pure
functions of (params0, data, cfg) and return the final weights together
with a per-epoch trace. When a ``reference`` vector (normally the same-seed
Retrain weights) is given, every trace record carries the cosine similarity
of the current weights to it.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from app.core.errors import EmptySetError, InvalidPlanError
from app.curriculum.plan import CurriculumPlan, validate_plan
from app.data.datasets import IdArray, LabeledDataset
from app.data.splits import ForgetSplit
from app.models.schema import MlpArchitecture, UnlearnConfig, UnlearnMethod
from app.nn.mlp import ParamVector, apply_update, loss_and_grad, per_sample_loss
from app.training.trainer import iter_batches, sgd_epoch
from app.unlearning.gradients import _correct, cosine_similarity, forgetting_mean_gradient
from app.unlearning.trace import TraceRecord, UnlearnTrace

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _require_method(cfg: UnlearnConfig, method: UnlearnMethod) -> None:
    if cfg.method != method:
        raise ValueError(f"config is for {cfg.method.value!r}, not {method.value!r}")


def _require_nonempty(ids: IdArray, what: str) -> None:
    if ids.size == 0:
        raise EmptySetError(what)


def mean_loss(
    arch: MlpArchitecture, params: ParamVector, ds: LabeledDataset, ids: IdArray
) -> float:
    """Mean cross-entropy over *ids*; nan for an empty id set."""
    if ids.size == 0:
        return math.nan
    features, labels = ds.rows(ids)
    return float(per_sample_loss(arch, params, features, labels).mean())


def epoch_record(
    arch: MlpArchitecture,
    params: ParamVector,
    ds: LabeledDataset,
    split: ForgetSplit,
    epoch: int,
    criterion_index: int = 0,
    fired: int = 0,
    angles: Optional[list[float]] = None,
    reference: Optional[ParamVector] = None,
) -> TraceRecord:
    return TraceRecord(
        epoch=epoch,
        criterion_index=criterion_index,
        retain_loss=mean_loss(arch, params, ds, split.retain_ids),
        forget_loss=mean_loss(arch, params, ds, split.forget_ids),
        corrections_fired=fired,
        cos_sim_to_reference=(
            cosine_similarity(params, reference) if reference is not None else math.nan
        ),
        angles=angles or [],
    )


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------


def unlearn_ft(
    arch: MlpArchitecture,
    params0: ParamVector,
    ds: LabeledDataset,
    split: ForgetSplit,
    cfg: UnlearnConfig,
    reference: Optional[ParamVector] = None,
) -> tuple[ParamVector, UnlearnTrace]:
    """Fine-tune on D_r only, warm-started from θ_D*."""
    _require_method(cfg, UnlearnMethod.FT)
    _require_nonempty(split.retain_ids, "retain set")
    features, labels = ds.rows(split.retain_ids)
    params = params0.copy()
    trace = UnlearnTrace()
    for epoch in range(cfg.epochs):
        params, _ = sgd_epoch(
            arch, params, features, labels, cfg.eta, cfg.batch_size, cfg.shuffle_seed, epoch
        )
        trace.append(epoch_record(arch, params, ds, split, epoch + 1, reference=reference))
    return params, trace


def unlearn_ga(
    arch: MlpArchitecture,
    params0: ParamVector,
    ds: LabeledDataset,
    split: ForgetSplit,
    cfg: UnlearnConfig,
    reference: Optional[ParamVector] = None,
) -> tuple[ParamVector, UnlearnTrace]:
    """Gradient ascent on D_f: θ ← θ + η·∇θ_Df per mini-batch."""
    _require_method(cfg, UnlearnMethod.GA)
    _require_nonempty(split.forget_ids, "forget set")
    features, labels = ds.rows(split.forget_ids)
    n = labels.shape[0]
    params = params0.copy()
    trace = UnlearnTrace()
    for epoch in range(cfg.epochs):
        for batch in iter_batches(n, cfg.batch_size, cfg.shuffle_seed, epoch):
            _, grad = loss_and_grad(arch, params, (features[batch], labels[batch]))
            params = apply_update(params, -grad, cfg.eta)
        trace.append(epoch_record(arch, params, ds, split, epoch + 1, reference=reference))
    return params, trace


# ---------------------------------------------------------------------------
# UFG / CUFG
# ---------------------------------------------------------------------------


def _ufg_epochs(
    arch: MlpArchitecture,
    params: ParamVector,
    ds: LabeledDataset,
    split: ForgetSplit,
    forget_ids: IdArray,
    cfg: UnlearnConfig,
    first_epoch: int,
    n_epochs: int,
    criterion_index: int,
    trace: UnlearnTrace,
    reference: Optional[ParamVector],
) -> ParamVector:
    """Fine-tune on D_r with the corrector guided by the mean gradient of *forget_ids*.

    The mean forget gradient is computed once at the start of each epoch and
    held fixed for every batch of that epoch. ``first_epoch`` keys the batch
    order, so a criterion's epochs continue the global epoch count.
    """
    features, labels = ds.rows(split.retain_ids)
    n = labels.shape[0]
    for epoch in range(first_epoch, first_epoch + n_epochs):
        g_f = forgetting_mean_gradient(arch, params, ds, forget_ids)
        fired = 0
        angles: list[float] = []
        for batch in iter_batches(n, cfg.batch_size, cfg.shuffle_seed, epoch):
            _, g_r = loss_and_grad(arch, params, (features[batch], labels[batch]))
            g_u, did_fire, angle = _correct(g_r, g_f, cfg.gamma)
            fired += int(did_fire)
            angles.append(math.nan if angle is None else angle)
            params = apply_update(params, g_u, cfg.eta)
        record = epoch_record(
            arch, params, ds, split, epoch + 1, criterion_index, fired, angles, reference
        )
        trace.append(record)
        logger.debug(
            "UFG epoch %d (criterion %d): %d/%d corrections, retain %.4f forget %.4f",
            epoch + 1,
            criterion_index,
            fired,
            len(angles),
            record.retain_loss,
            record.forget_loss,
        )
    return params


def unlearn_ufg(
    arch: MlpArchitecture,
    params0: ParamVector,
    ds: LabeledDataset,
    split: ForgetSplit,
    cfg: UnlearnConfig,
    reference: Optional[ParamVector] = None,
) -> tuple[ParamVector, UnlearnTrace]:
    """Fine-tuning on D_r with forgetting-gradient correction."""
    _require_method(cfg, UnlearnMethod.UFG)
    _require_nonempty(split.forget_ids, "forget set")
    _require_nonempty(split.retain_ids, "retain set")
    trace = UnlearnTrace()
    params = _ufg_epochs(
        arch, params0.copy(), ds, split, split.forget_ids, cfg, 0, cfg.epochs, 0, trace, reference
    )
    return params, trace


def unlearn_cufg(
    arch: MlpArchitecture,
    params0: ParamVector,
    ds: LabeledDataset,
    split: ForgetSplit,
    cfg: UnlearnConfig,
    plan: CurriculumPlan,
    reference: Optional[ParamVector] = None,
) -> tuple[ParamVector, UnlearnTrace]:
    """UFG criterion by criterion, easiest first, E/n epochs each."""
    _require_method(cfg, UnlearnMethod.CUFG)
    _require_nonempty(split.forget_ids, "forget set")
    _require_nonempty(split.retain_ids, "retain set")
    if len(plan) != cfg.n_criteria:
        raise InvalidPlanError(
            [f"plan has {len(plan)} criteria, config expects n_criteria={cfg.n_criteria}"]
        )
    violations = validate_plan(plan, split.forget_ids)
    if violations:
        raise InvalidPlanError(violations)

    per_criterion = cfg.epochs // len(plan)
    trace = UnlearnTrace()
    params = params0.copy()
    for index, criterion in enumerate(plan.criteria):
        params = _ufg_epochs(
            arch,
            params,
            ds,
            split,
            criterion,
            cfg,
            index * per_criterion,
            per_criterion,
            index,
            trace,
            reference,
        )
        logger.debug("Criterion %d/%d done (%d samples)", index + 1, len(plan), criterion.size)
    return params, trace


def run_unlearning(
    arch: MlpArchitecture,
    params0: ParamVector,
    ds: LabeledDataset,
    split: ForgetSplit,
    cfg: UnlearnConfig,
    plan: Optional[CurriculumPlan] = None,
    reference: Optional[ParamVector] = None,
) -> tuple[ParamVector, UnlearnTrace]:
    """Dispatch on ``cfg.method``. Retrain is not an unlearning step and is rejected."""
    if cfg.method == UnlearnMethod.FT:
        return unlearn_ft(arch, params0, ds, split, cfg, reference)
    if cfg.method == UnlearnMethod.GA:
        return unlearn_ga(arch, params0, ds, split, cfg, reference)
    if cfg.method == UnlearnMethod.UFG:
        return unlearn_ufg(arch, params0, ds, split, cfg, reference)
    if cfg.method == UnlearnMethod.CUFG:
        if plan is None:
            raise InvalidPlanError(["cufg requires a curriculum plan"])
        return unlearn_cufg(arch, params0, ds, split, cfg, plan, reference)
    raise ValueError(f"{cfg.method.value!r} is not an unlearning method; use retrain()")


def fired_from_angles(angles: list[float], gamma: float) -> int:
    """Recount corrections from logged angles (nan angles never fire)."""
    return int(sum(1 for a in angles if not np.isnan(a) and a < gamma))
