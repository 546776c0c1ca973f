"""ERM training from scratch: the original model θ_D* and the Retrain reference.

Batch order is drawn from a counter-based generator (Philox) keyed by
(shuffle_seed, epoch), so epoch k of any run sees the same permutation no
matter how many epochs ran before it. Fine-tuning based unlearning reuses
``sgd_epoch`` so that FT over D_r is step-for-step identical to training on
D_r from a warm start.
"""

from __future__ import annotations

import logging
from typing import Callable, Iterator, Optional

import numpy as np

from app.core.errors import EmptySetError
from app.data.datasets import IdArray, LabeledDataset
from app.data.splits import ForgetSplit
from app.models.schema import MlpArchitecture, TrainHyper
from app.nn.mlp import Labels, Matrix, ParamVector, apply_update, init_params, loss_and_grad

logger = logging.getLogger(__name__)

EpochCallback = Callable[[int, ParamVector], None]


# ---------------------------------------------------------------------------
# Batching
# ---------------------------------------------------------------------------


def batch_order(n: int, shuffle_seed: int, epoch: int) -> IdArray:
    """Permutation of 0…n−1 for one epoch."""
    key = np.array([shuffle_seed, epoch], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    return rng.permutation(n).astype(np.int64)


def iter_batches(
    n: int, batch_size: int, shuffle_seed: int, epoch: int
) -> Iterator[IdArray]:
    """Row positions of each mini-batch; the last batch may be short."""
    order = batch_order(n, shuffle_seed, epoch)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def sgd_epoch(
    arch: MlpArchitecture,
    params: ParamVector,
    features: Matrix,
    labels: Labels,
    eta: float,
    batch_size: int,
    shuffle_seed: int,
    epoch: int,
) -> tuple[ParamVector, float]:
    """One pass of plain mini-batch SGD; returns new params and the epoch's mean loss."""
    n = labels.shape[0]
    total = 0.0
    for batch in iter_batches(n, batch_size, shuffle_seed, epoch):
        loss, grad = loss_and_grad(arch, params, (features[batch], labels[batch]))
        total += loss * batch.shape[0]
        params = apply_update(params, grad, eta)
    return params, total / n


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


def train_erm(
    arch: MlpArchitecture,
    init: ParamVector,
    ds: LabeledDataset,
    h: TrainHyper,
    on_epoch: Optional[EpochCallback] = None,
) -> tuple[ParamVector, list[float]]:
    """Mini-batch SGD on the whole of *ds* starting from *init*.

    Runs ``h.epochs × ceil(n / batch_size)`` steps. The loss curve holds the
    sample-weighted mean training loss of every epoch.
    """
    if len(ds) == 0:
        raise EmptySetError("training set")
    features, labels = ds.rows(ds.ids)
    params = init.copy()
    curve: list[float] = []
    for epoch in range(h.epochs):
        params, epoch_loss = sgd_epoch(
            arch, params, features, labels, h.eta, h.batch_size, h.shuffle_seed, epoch
        )
        curve.append(epoch_loss)
        logger.debug("ERM epoch %d/%d loss %.6f", epoch + 1, h.epochs, epoch_loss)
        if on_epoch is not None:
            on_epoch(epoch, params)
    return params, curve


def retrain(
    arch: MlpArchitecture,
    seed: int,
    split: ForgetSplit,
    ds: LabeledDataset,
    h: TrainHyper,
    on_epoch: Optional[EpochCallback] = None,
) -> ParamVector:
    """Gold standard θ_Dr*: train from the same θ_0 on D_r only."""
    if split.retain_ids.size == 0:
        raise EmptySetError("retain set")
    retained = ds.restrict(split.retain_ids)
    params, curve = train_erm(arch, init_params(arch, seed), retained, h, on_epoch)
    logger.info(
        "Retrained on %d retained samples, final loss %.6f", len(retained), curve[-1]
    )
    return params
