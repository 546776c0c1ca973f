"""Data models package.

Public surface area; import from here rather than from sub-modules directly.
"""

from app.models.schema import (
    CURRENT_SCHEMA_VERSION,
    Activation,
    ArchitectureSpec,
    BlobsDatasetSpec,
    ClassScenario,
    CsvDatasetSpec,
    CurriculumSettings,
    DifficultyMeasure,
    ExperimentConfig,
    GapReport,
    MethodOverrides,
    MetricsReport,
    MiaSettings,
    MlpArchitecture,
    RandomScenario,
    SliceStrategy,
    SweepParameter,
    ToolkitBaseModel,
    TrainHyper,
    TrainSettings,
    UnlearnConfig,
    UnlearnMethod,
)
from app.models.validators import CHECKPOINT_SCHEMA, PLAN_SCHEMA, validate_document

__all__ = [
    # Schema version
    "CURRENT_SCHEMA_VERSION",
    # Base
    "ToolkitBaseModel",
    # Enums
    "Activation",
    "UnlearnMethod",
    "DifficultyMeasure",
    "SliceStrategy",
    "SweepParameter",
    # Model / optimisation
    "MlpArchitecture",
    "TrainHyper",
    "UnlearnConfig",
    # Reports
    "MetricsReport",
    "GapReport",
    # Experiment config
    "ExperimentConfig",
    "BlobsDatasetSpec",
    "CsvDatasetSpec",
    "ArchitectureSpec",
    "TrainSettings",
    "RandomScenario",
    "ClassScenario",
    "MethodOverrides",
    "CurriculumSettings",
    "MiaSettings",
    # Validation
    "CHECKPOINT_SCHEMA",
    "PLAN_SCHEMA",
    "validate_document",
]
