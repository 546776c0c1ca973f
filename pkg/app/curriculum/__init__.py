from app.curriculum.difficulty import DifficultyScores, difficulty_scores
from app.curriculum.plan import (
    CurriculumPlan,
    build_plan,
    export_score_histogram,
    plan_from_document,
    plan_to_document,
    validate_plan,
)

__all__ = [
    "DifficultyScores",
    "difficulty_scores",
    "CurriculumPlan",
    "build_plan",
    "validate_plan",
    "export_score_histogram",
    "plan_to_document",
    "plan_from_document",
]
