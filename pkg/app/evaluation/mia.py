"""Membership inference efficacy on the forget set.

The attack sees, per sample, the target model's softmax vector sorted
ascending plus its cross-entropy loss. Members are D_r of the training set,
non-members the held-out test set; the larger pool is subsampled (seeded) so
the attack trains on a balanced set. A softmax-regression classifier with two
outputs (class 1 = member) starts from zero weights and is fitted with the
same mini-batch SGD as the target model. Logits closer than a small
tolerance count as a tie, and ties go to non-member. The score is the
percentage of D_f predicted non-member.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from app.core.config import DEFAULT_MIA_BATCH_SIZE, DEFAULT_MIA_EPOCHS, DEFAULT_MIA_ETA
from app.core.errors import DimensionMismatchError, EmptySetError
from app.data.datasets import IdArray, LabeledDataset
from app.evaluation.metrics import accuracy
from app.models.schema import MlpArchitecture, TrainHyper
from app.nn.mlp import (
    Labels,
    Matrix,
    ParamVector,
    forward,
    param_count,
    per_sample_loss,
    predict_proba,
)
from app.training.trainer import train_erm

logger = logging.getLogger(__name__)

MEMBER = 1
NON_MEMBER = 0

# Pool-size ratio above which subsampling is reported.
_SUBSAMPLE_WARN_RATIO = 10

# Logit gap below which the attack is undecided.
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MiaResult:
    score: float
    attack_train_accuracy: float
    n_per_side: int


def attack_features(
    arch: MlpArchitecture, params: ParamVector, features: Matrix, labels: Labels
) -> NDArray[np.float64]:
    """Sorted softmax probabilities followed by the per-sample loss."""
    proba = np.sort(predict_proba(arch, params, features), axis=1)
    loss = per_sample_loss(arch, params, features, labels)
    return np.hstack([proba, loss[:, None]])


def balanced_indices(
    n_members: int, n_nonmembers: int, seed: int
) -> tuple[IdArray, IdArray]:
    """Row positions of an equal-sized member / non-member selection."""
    if n_members == 0:
        raise EmptySetError("member pool")
    if n_nonmembers == 0:
        raise EmptySetError("non-member pool")
    k = min(n_members, n_nonmembers)
    rng = np.random.default_rng(seed)

    def pick(n: int) -> IdArray:
        if n == k:
            return np.arange(n, dtype=np.int64)
        return np.sort(rng.choice(n, size=k, replace=False)).astype(np.int64)

    larger = max(n_members, n_nonmembers)
    if larger > _SUBSAMPLE_WARN_RATIO * k:
        logger.warning("MIA attack pools subsampled from %d to %d samples", larger, k)
    return pick(n_members), pick(n_nonmembers)


def predict_membership(
    attack_arch: MlpArchitecture, attack_params: ParamVector, features: NDArray[np.float64]
) -> NDArray[np.int64]:
    """1 for predicted member, 0 for non-member (ties go to non-member)."""
    logits = forward(attack_arch, attack_params, features)
    margin = logits[:, MEMBER] - logits[:, NON_MEMBER]
    return np.where(margin > TIE_TOLERANCE, MEMBER, NON_MEMBER).astype(np.int64)


def nonmember_percentage(predicted: NDArray[np.int64]) -> float:
    if predicted.size == 0:
        raise EmptySetError("forget set")
    return 100.0 * float(np.count_nonzero(predicted == NON_MEMBER)) / predicted.size


def run_mia_attack(
    arch: MlpArchitecture,
    params_u: ParamVector,
    member_pool: tuple[LabeledDataset, IdArray],
    nonmember_pool: LabeledDataset,
    forget_ids: IdArray,
    attack_seed: int,
    *,
    epochs: int = DEFAULT_MIA_EPOCHS,
    eta: float = DEFAULT_MIA_ETA,
    batch_size: int = DEFAULT_MIA_BATCH_SIZE,
) -> MiaResult:
    ds, retain_ids = member_pool
    forget = np.asarray(forget_ids, dtype=np.int64)
    if forget.size == 0:
        raise EmptySetError("forget set")

    member_x = attack_features(arch, params_u, *ds.rows(retain_ids))
    nonmember_x = attack_features(
        arch, params_u, *nonmember_pool.rows(nonmember_pool.ids)
    )
    if member_x.shape[1] != nonmember_x.shape[1]:
        raise DimensionMismatchError(
            "attack feature width", member_x.shape[1], nonmember_x.shape[1]
        )

    pool_seed, shuffle_seed = (
        int(s) for s in np.random.SeedSequence(attack_seed).generate_state(2)
    )
    m_idx, n_idx = balanced_indices(member_x.shape[0], nonmember_x.shape[0], pool_seed)
    k = m_idx.size
    attack_ds = LabeledDataset(
        features=np.vstack([member_x[m_idx], nonmember_x[n_idx]]),
        labels=np.concatenate(
            [np.full(k, MEMBER, dtype=np.int64), np.full(k, NON_MEMBER, dtype=np.int64)]
        ),
        n_classes=2,
    )

    attack_arch = MlpArchitecture(layer_widths=[attack_ds.n_features, 2])
    hyper = TrainHyper(eta=eta, epochs=epochs, batch_size=batch_size, shuffle_seed=shuffle_seed)
    attack_params, _ = train_erm(
        attack_arch, np.zeros(param_count(attack_arch)), attack_ds, hyper
    )
    train_acc = accuracy(attack_arch, attack_params, attack_ds, attack_ds.ids)

    forget_x = attack_features(arch, params_u, *ds.rows(forget))
    score = nonmember_percentage(predict_membership(attack_arch, attack_params, forget_x))
    logger.debug(
        "MIA attack: %d per side, train accuracy %.2f, score %.2f", k, train_acc, score
    )
    return MiaResult(score=score, attack_train_accuracy=train_acc, n_per_side=k)


def mia_score(
    arch: MlpArchitecture,
    params_u: ParamVector,
    member_pool: tuple[LabeledDataset, IdArray],
    nonmember_pool: LabeledDataset,
    forget_ids: IdArray,
    attack_seed: int,
    *,
    epochs: int = DEFAULT_MIA_EPOCHS,
    eta: float = DEFAULT_MIA_ETA,
    batch_size: int = DEFAULT_MIA_BATCH_SIZE,
) -> float:
    """Percentage of D_f the attack labels non-member."""
    return run_mia_attack(
        arch,
        params_u,
        member_pool,
        nonmember_pool,
        forget_ids,
        attack_seed,
        epochs=epochs,
        eta=eta,
        batch_size=batch_size,
    ).score
