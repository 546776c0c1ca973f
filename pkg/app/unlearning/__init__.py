from app.unlearning.gradients import (
    correct_gradient,
    cosine_similarity,
    forgetting_mean_gradient,
    gradient_angle,
)
from app.unlearning.methods import (
    run_unlearning,
    unlearn_cufg,
    unlearn_ft,
    unlearn_ga,
    unlearn_ufg,
)
from app.unlearning.trace import TRACE_COLUMNS, TraceRecord, UnlearnTrace

__all__ = [
    "forgetting_mean_gradient",
    "gradient_angle",
    "correct_gradient",
    "cosine_similarity",
    "unlearn_ft",
    "unlearn_ga",
    "unlearn_ufg",
    "unlearn_cufg",
    "run_unlearning",
    "TRACE_COLUMNS",
    "TraceRecord",
    "UnlearnTrace",
]
