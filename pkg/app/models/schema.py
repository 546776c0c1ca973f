"""Typed configuration and report models for the unlearning toolkit.

Core types:
  MlpArchitecture : layer widths + activation of the dense classifier
  TrainHyper      : mini-batch SGD hyperparameters for ERM / Retrain
  UnlearnConfig   : method selector plus eta, E, gamma, n for one unlearning run
  MetricsReport   : UA / RA / TA / MIA / RTE of one model
  GapReport       : absolute per-metric gaps against the Retrain report
  ExperimentConfig: the JSON experiment file driving the harness

Every config model forbids unknown keys so that a typo in an experiment file
fails fast instead of silently falling back to a default.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import (
    DEFAULT_GAMMA,
    DEFAULT_HISTOGRAM_BINS,
    DEFAULT_MIA_BATCH_SIZE,
    DEFAULT_MIA_EPOCHS,
    DEFAULT_MIA_ETA,
    DEFAULT_N_CRITERIA,
    DEFAULT_TRAIN_BATCH_SIZE,
    DEFAULT_TRAIN_EPOCHS,
    DEFAULT_TRAIN_ETA,
    DEFAULT_UNLEARN_BATCH_SIZE,
)

CURRENT_SCHEMA_VERSION = "1.0.0"

HALF_PI = math.pi / 2
U64_MAX = 2**64 - 1


# ---------------------------------------------------------------------------
# Enumerations
# ---------------------------------------------------------------------------


class Activation(str, Enum):
    """Hidden-layer nonlinearity."""

    RELU = "relu"
    TANH = "tanh"


class UnlearnMethod(str, Enum):
    """Unlearning procedures the harness can run."""

    RETRAIN = "retrain"
    FT = "ft"
    GA = "ga"
    UFG = "ufg"
    CUFG = "cufg"


class DifficultyMeasure(str, Enum):
    """How forgetting difficulty is scored from the trained model."""

    CONFIDENCE = "confidence"
    LOSS = "loss"


class SliceStrategy(str, Enum):
    """How the sorted forget queue is cut into criteria."""

    EQUAL_SIZE = "equal_size"
    QUANTILE = "quantile"


class SweepParameter(str, Enum):
    """Hyperparameters a sweep can vary."""

    GAMMA = "gamma"
    N_CRITERIA = "n_criteria"
    FORGET_FRACTION = "forget_fraction"


# ---------------------------------------------------------------------------
# Base model
# ---------------------------------------------------------------------------


class ToolkitBaseModel(BaseModel):
    """Shared model configuration: strict keys, immutable instances."""

    model_config = ConfigDict(extra="forbid", frozen=True)


Seed = Annotated[int, Field(ge=0, le=U64_MAX)]


# ---------------------------------------------------------------------------
# Model / optimisation types
# ---------------------------------------------------------------------------


class MlpArchitecture(ToolkitBaseModel):
    """Dense feed-forward classifier: input width, hidden widths, class count."""

    layer_widths: list[Annotated[int, Field(gt=0)]] = Field(..., min_length=2)
    activation: Activation = Activation.RELU

    @property
    def n_inputs(self) -> int:
        return self.layer_widths[0]

    @property
    def n_classes(self) -> int:
        return self.layer_widths[-1]

    @property
    def n_params(self) -> int:
        widths = self.layer_widths
        return sum(a * b + b for a, b in zip(widths[:-1], widths[1:]))


class TrainHyper(ToolkitBaseModel):
    """Mini-batch SGD hyperparameters for training from scratch."""

    eta: float = Field(..., gt=0)
    epochs: int = Field(..., ge=1)
    batch_size: int = Field(..., ge=1)
    shuffle_seed: Seed = 0


class UnlearnConfig(ToolkitBaseModel):
    """One unlearning run: method plus eta, E, gamma, n and batching."""

    method: UnlearnMethod
    eta: float = Field(..., gt=0)
    epochs: int = Field(..., ge=0)
    gamma: float = Field(default=DEFAULT_GAMMA, ge=0.0, le=HALF_PI)
    n_criteria: int = Field(default=DEFAULT_N_CRITERIA, ge=1)
    batch_size: int = Field(default=DEFAULT_UNLEARN_BATCH_SIZE, ge=1)
    shuffle_seed: Seed = 0

    @model_validator(mode="after")
    def epochs_divisible_by_criteria(self) -> "UnlearnConfig":
        if self.method == UnlearnMethod.CUFG and self.epochs % self.n_criteria != 0:
            raise ValueError(
                f"cufg epochs ({self.epochs}) must be divisible by "
                f"n_criteria ({self.n_criteria})"
            )
        return self


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

Percentage = Annotated[float, Field(ge=0.0, le=100.0)]


class MetricsReport(ToolkitBaseModel):
    """UA / RA / TA / MIA (percentages) and RTE (seconds) for one model."""

    method: str
    seed: Seed
    ua: Percentage
    ra: Percentage
    ta: Percentage
    mia: Percentage
    rte_seconds: float = Field(default=0.0, ge=0.0)


class GapReport(ToolkitBaseModel):
    """Absolute gaps of a report against the same-seed Retrain report."""

    method: str
    reference_method: str
    seed: Seed
    ua_gap: float = Field(..., ge=0.0)
    ra_gap: float = Field(..., ge=0.0)
    ta_gap: float = Field(..., ge=0.0)
    mia_gap: float = Field(..., ge=0.0)
    avg_gap: float = Field(..., ge=0.0)


# ---------------------------------------------------------------------------
# Experiment configuration
# ---------------------------------------------------------------------------


class BlobsDatasetSpec(ToolkitBaseModel):
    """Synthetic Gaussian clusters; the test set is an independent draw."""

    kind: Literal["blobs"] = "blobs"
    n_per_class: int = Field(..., gt=0)
    n_classes: int = Field(..., gt=0)
    n_features: int = Field(..., gt=0)
    spread: float = Field(..., ge=0.0)
    test_n_per_class: Optional[int] = Field(default=None, gt=0)


class CsvDatasetSpec(ToolkitBaseModel):
    """Train / test CSV files, last column the integer label."""

    kind: Literal["csv"] = "csv"
    path: str = Field(..., min_length=1)
    test_path: str = Field(..., min_length=1)
    header: bool = False


DatasetSpec = Annotated[
    Union[BlobsDatasetSpec, CsvDatasetSpec], Field(discriminator="kind")
]


class ArchitectureSpec(ToolkitBaseModel):
    """Hidden layers only; input and output widths come from the dataset."""

    hidden_widths: list[Annotated[int, Field(gt=0)]] = Field(default_factory=lambda: [32])
    activation: Activation = Activation.RELU


class TrainSettings(ToolkitBaseModel):
    eta: float = Field(default=DEFAULT_TRAIN_ETA, gt=0)
    epochs: int = Field(default=DEFAULT_TRAIN_EPOCHS, ge=1)
    batch_size: int = Field(default=DEFAULT_TRAIN_BATCH_SIZE, ge=1)


class RandomScenario(ToolkitBaseModel):
    kind: Literal["random"] = "random"
    fraction: float = Field(..., gt=0.0, lt=1.0)


class ClassScenario(ToolkitBaseModel):
    kind: Literal["class"] = "class"
    class_label: int = Field(..., ge=0)


Scenario = Annotated[Union[RandomScenario, ClassScenario], Field(discriminator="kind")]


class MethodOverrides(ToolkitBaseModel):
    """Per-method overrides of the unlearning defaults."""

    eta: Optional[float] = Field(default=None, gt=0)
    epochs: Optional[int] = Field(default=None, ge=0)
    gamma: Optional[float] = Field(default=None, ge=0.0, le=HALF_PI)
    batch_size: Optional[int] = Field(default=None, ge=1)


class CurriculumSettings(ToolkitBaseModel):
    measure: DifficultyMeasure = DifficultyMeasure.CONFIDENCE
    strategy: SliceStrategy = SliceStrategy.EQUAL_SIZE
    n_criteria: int = Field(default=DEFAULT_N_CRITERIA, ge=1)
    histogram_bins: int = Field(default=DEFAULT_HISTOGRAM_BINS, ge=1)


class MiaSettings(ToolkitBaseModel):
    epochs: int = Field(default=DEFAULT_MIA_EPOCHS, ge=1)
    eta: float = Field(default=DEFAULT_MIA_ETA, gt=0)
    batch_size: int = Field(default=DEFAULT_MIA_BATCH_SIZE, ge=1)


class ExperimentConfig(ToolkitBaseModel):
    """A complete, versioned experiment description."""

    schema_version: str = CURRENT_SCHEMA_VERSION
    dataset: DatasetSpec
    architecture: ArchitectureSpec = Field(default_factory=ArchitectureSpec)
    train: TrainSettings = Field(default_factory=TrainSettings)
    scenario: Scenario
    methods: list[UnlearnMethod] = Field(..., min_length=1)
    unlearn: dict[UnlearnMethod, MethodOverrides] = Field(default_factory=dict)
    curriculum: CurriculumSettings = Field(default_factory=CurriculumSettings)
    mia: MiaSettings = Field(default_factory=MiaSettings)
    seeds: list[Seed] = Field(..., min_length=1)
    output_dir: str = "results"

    @field_validator("schema_version")
    @classmethod
    def schema_version_supported(cls, v: str) -> str:
        if v != CURRENT_SCHEMA_VERSION:
            raise ValueError(
                f"unsupported schema_version {v!r} (expected {CURRENT_SCHEMA_VERSION!r})"
            )
        return v

    @field_validator("methods")
    @classmethod
    def methods_unique(cls, v: list[UnlearnMethod]) -> list[UnlearnMethod]:
        if len(set(v)) != len(v):
            raise ValueError("methods must not repeat")
        return v

    @field_validator("seeds")
    @classmethod
    def seeds_unique(cls, v: list[int]) -> list[int]:
        if len(set(v)) != len(v):
            raise ValueError("seeds must not repeat")
        return v

    @model_validator(mode="after")
    def cufg_epochs_divisible(self) -> "ExperimentConfig":
        if UnlearnMethod.CUFG in self.methods:
            override = self.unlearn.get(UnlearnMethod.CUFG)
            epochs = override.epochs if override is not None else None
            if epochs is not None and epochs % self.curriculum.n_criteria != 0:
                raise ValueError(
                    f"cufg epochs ({epochs}) must be divisible by "
                    f"curriculum.n_criteria ({self.curriculum.n_criteria})"
                )
        return self

    @property
    def unlearning_methods(self) -> list[UnlearnMethod]:
        """Requested methods minus Retrain, which always runs as the reference."""
        return [m for m in self.methods if m != UnlearnMethod.RETRAIN]
