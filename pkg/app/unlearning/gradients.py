"""Forgetting gradient and the gradient corrector.

The forgetting gradient is the negated mean D_f gradient. When the angle
between the mean D_f gradient and a D_r batch gradient drops below gamma,
the batch step is replaced by ½(−g_f + g_r); otherwise g_r is used as is.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from app.core.errors import DimensionMismatchError, EmptySetError, ZeroGradientError
from app.data.datasets import IdArray, LabeledDataset
from app.models.schema import MlpArchitecture
from app.nn.mlp import GradientVector, ParamVector, loss_and_grad

logger = logging.getLogger(__name__)


def forgetting_mean_gradient(
    arch: MlpArchitecture, params: ParamVector, ds: LabeledDataset, forget_ids: IdArray
) -> GradientVector:
    """Mean per-sample gradient over D_f at *params* ("all+once": one pass over D_f).

    The gradient of the mean loss equals the mean of the per-sample gradients,
    so the whole forget set goes through loss_and_grad in ascending id order.
    Callers negate the result to obtain the forgetting gradient.
    """
    ids = np.sort(np.asarray(forget_ids, dtype=np.int64))
    if ids.size == 0:
        raise EmptySetError("forget set")
    _, grad = loss_and_grad(arch, params, ds.rows(ids))
    return grad


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two flat vectors; nan if either is zero."""
    if a.shape != b.shape:
        raise DimensionMismatchError("vector length", a.shape, b.shape)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return math.nan
    return float(np.dot(a, b) / (na * nb))


def gradient_angle(g1: GradientVector, g2: GradientVector) -> float:
    """Angle between two gradients in radians, in [0, π]."""
    if g1.shape != g2.shape:
        raise DimensionMismatchError("gradient length", g1.shape, g2.shape)
    n1 = float(np.linalg.norm(g1))
    n2 = float(np.linalg.norm(g2))
    if n1 == 0.0:
        raise ZeroGradientError("first gradient")
    if n2 == 0.0:
        raise ZeroGradientError("second gradient")
    cos = float(np.dot(g1, g2) / (n1 * n2))
    return math.acos(min(1.0, max(-1.0, cos)))


def _correct(
    g_r: GradientVector, g_f_mean: GradientVector, gamma: float
) -> tuple[GradientVector, bool, Optional[float]]:
    """Gradient corrector returning the angle as well (None when undefined)."""
    if g_r.shape != g_f_mean.shape:
        raise DimensionMismatchError("gradient length", g_r.shape, g_f_mean.shape)
    try:
        angle = gradient_angle(g_f_mean, g_r)
    except ZeroGradientError as exc:
        logger.debug("Gradient correction skipped: %s", exc)
        return g_r, False, None
    if angle < gamma:
        return 0.5 * (-g_f_mean + g_r), True, angle
    return g_r, False, angle


def correct_gradient(
    g_r: GradientVector, g_f_mean: GradientVector, gamma: float
) -> tuple[GradientVector, bool]:
    """Apply the corrector to one retain-batch gradient; returns (gradient, fired)."""
    corrected, fired, _ = _correct(g_r, g_f_mean, gamma)
    return corrected, fired
