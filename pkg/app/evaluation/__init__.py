from app.evaluation.evaluate import evaluate_model
from app.evaluation.metrics import (
    accuracy,
    avg_gap,
    compute_ra,
    compute_ta,
    compute_ua,
    measure_rte,
    timed_call,
)
from app.evaluation.mia import MiaResult, mia_score, run_mia_attack

__all__ = [
    "accuracy",
    "compute_ua",
    "compute_ra",
    "compute_ta",
    "avg_gap",
    "measure_rte",
    "timed_call",
    "MiaResult",
    "run_mia_attack",
    "mia_score",
    "evaluate_model",
]
