"""One-call evaluation of a model against a forget split and a test set."""

from __future__ import annotations

import logging

from app.data.datasets import LabeledDataset
from app.data.splits import ForgetSplit
from app.evaluation.metrics import compute_ra, compute_ta, compute_ua
from app.evaluation.mia import run_mia_attack
from app.models.schema import MetricsReport, MiaSettings, MlpArchitecture
from app.nn.mlp import ParamVector

logger = logging.getLogger(__name__)


def evaluate_model(
    arch: MlpArchitecture,
    params: ParamVector,
    ds: LabeledDataset,
    split: ForgetSplit,
    test_ds: LabeledDataset,
    *,
    method: str,
    seed: int,
    attack_seed: int,
    mia: MiaSettings = MiaSettings(),
    rte_seconds: float = 0.0,
) -> MetricsReport:
    """UA / RA / TA / MIA of *params*; members are D_r, non-members the test set."""
    attack = run_mia_attack(
        arch,
        params,
        (ds, split.retain_ids),
        test_ds,
        split.forget_ids,
        attack_seed,
        epochs=mia.epochs,
        eta=mia.eta,
        batch_size=mia.batch_size,
    )
    report = MetricsReport(
        method=method,
        seed=seed,
        ua=compute_ua(arch, params, ds, split.forget_ids),
        ra=compute_ra(arch, params, ds, split.retain_ids),
        ta=compute_ta(arch, params, test_ds),
        mia=attack.score,
        rte_seconds=rte_seconds,
    )
    logger.info(
        "%s seed %d: UA %.2f RA %.2f TA %.2f MIA %.2f (attack acc %.1f)",
        method,
        seed,
        report.ua,
        report.ra,
        report.ta,
        report.mia,
        attack.attack_train_accuracy,
    )
    return report
