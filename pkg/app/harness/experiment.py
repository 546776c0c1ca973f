"""Seeded experiment pipeline: train θ_D*, split, Retrain, unlearn, evaluate.

Each experiment seed is expanded into independent sub-seeds, one per random
stream, so that changing e.g. the split never perturbs the initial weights.
The output tree is a pure function of the config apart from runtime.csv.

Layout::

    <out>/seed_<s>/<method>/report.json   metrics + gap to same-seed Retrain
    <out>/seed_<s>/<method>/trace.csv     per-epoch unlearning curve
    <out>/seed_<s>/<method>/model.json    checkpoint
    <out>/seed_<s>/cufg/plan.json         curriculum plan
    <out>/seed_<s>/cufg/score_histogram.csv
    <out>/summary.csv, summary_table.csv, runtime.csv
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import ValidationError

from app.core.config import (
    DEFAULT_GA_EPOCHS,
    DEFAULT_GA_ETA,
    DEFAULT_GAMMA,
    DEFAULT_UNLEARN_BATCH_SIZE,
    DEFAULT_UNLEARN_EPOCHS,
    DEFAULT_UNLEARN_ETA,
    default_cufg_epochs,
    settings,
)
from app.core.errors import ConfigError, UnknownClassError
from app.curriculum.difficulty import DifficultyScores, difficulty_scores
from app.curriculum.plan import CurriculumPlan, build_plan
from app.data.datasets import LabeledDataset, load_csv, make_blobs
from app.data.splits import ForgetSplit, split_classwise, split_random
from app.evaluation.evaluate import evaluate_model
from app.evaluation.metrics import avg_gap, timed_call
from app.harness import reports
from app.models.schema import (
    BlobsDatasetSpec,
    ExperimentConfig,
    GapReport,
    MetricsReport,
    MlpArchitecture,
    RandomScenario,
    TrainHyper,
    UnlearnConfig,
    UnlearnMethod,
)
from app.nn.mlp import ParamVector, init_params
from app.training.trainer import retrain, train_erm
from app.unlearning.methods import epoch_record, run_unlearning
from app.unlearning.trace import UnlearnTrace

logger = logging.getLogger(__name__)

SEED_STREAMS = {
    "data": 0,
    "test": 1,
    "init": 2,
    "split": 3,
    "train_shuffle": 4,
    "unlearn_shuffle": 5,
    "mia": 6,
}


def derive_seed(seed: int, stream: str) -> int:
    """Independent 64-bit sub-seed of *seed* for one named random stream."""
    state = np.random.SeedSequence([seed, SEED_STREAMS[stream]]).generate_state(1, np.uint64)
    return int(state[0])


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate an experiment config file; every failure is a ConfigError."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config ({exc.strerror or exc})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(raw)


def parse_config(raw: object) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError.from_validation_error(exc) from exc


def with_seeds(cfg: ExperimentConfig, seeds: list[int]) -> ExperimentConfig:
    """Copy of *cfg* running only *seeds* (validated)."""
    return parse_config({**cfg.model_dump(mode="json"), "seeds": seeds})


def with_methods(cfg: ExperimentConfig, methods: list[UnlearnMethod]) -> ExperimentConfig:
    """Copy of *cfg* running only *methods* (Retrain still runs as the reference)."""
    raw = cfg.model_dump(mode="json")
    return parse_config({**raw, "methods": [m.value for m in methods]})


def resolve_unlearn_config(
    cfg: ExperimentConfig, method: UnlearnMethod, seed: int
) -> UnlearnConfig:
    """Defaults for *method* with the config's overrides applied.

    FT, UFG and CUFG share one shuffle stream per seed, so their batch orders
    coincide epoch by epoch. Without an explicit epoch count CUFG gets the
    multiple of n_criteria nearest the unlearning default.
    """
    is_ga = method == UnlearnMethod.GA
    n_criteria = cfg.curriculum.n_criteria
    if is_ga:
        epochs = DEFAULT_GA_EPOCHS
    elif method == UnlearnMethod.CUFG:
        epochs = default_cufg_epochs(n_criteria)
    else:
        epochs = DEFAULT_UNLEARN_EPOCHS
    values = {
        "method": method,
        "eta": DEFAULT_GA_ETA if is_ga else DEFAULT_UNLEARN_ETA,
        "epochs": epochs,
        "gamma": DEFAULT_GAMMA,
        "n_criteria": n_criteria,
        "batch_size": DEFAULT_UNLEARN_BATCH_SIZE,
        "shuffle_seed": derive_seed(seed, "unlearn_shuffle"),
    }
    override = cfg.unlearn.get(method)
    if override is not None:
        values.update(override.model_dump(exclude_none=True))
    try:
        return UnlearnConfig.model_validate(values)
    except ValidationError as exc:
        raise ConfigError.from_validation_error(exc, prefix=f"unlearn.{method.value}") from exc


# ---------------------------------------------------------------------------
# Per-seed context
# ---------------------------------------------------------------------------


def build_datasets(cfg: ExperimentConfig, seed: int) -> tuple[LabeledDataset, LabeledDataset]:
    """(train, test) datasets; blobs are drawn per seed, CSV files are fixed."""
    spec = cfg.dataset
    if isinstance(spec, BlobsDatasetSpec):
        train = make_blobs(
            spec.n_per_class,
            spec.n_classes,
            spec.n_features,
            spec.spread,
            derive_seed(seed, "data"),
        )
        test = make_blobs(
            spec.test_n_per_class or spec.n_per_class,
            spec.n_classes,
            spec.n_features,
            spec.spread,
            derive_seed(seed, "test"),
        )
        return train, test

    train = load_csv(spec.path, header=spec.header)
    test = load_csv(spec.test_path, header=spec.header)
    if train.n_features != test.n_features:
        raise ConfigError(
            "dataset.test_path",
            f"{test.n_features} feature columns, training data has {train.n_features}",
        )
    n_classes = max(train.n_classes, test.n_classes)
    return (
        LabeledDataset(train.features, train.labels, n_classes),
        LabeledDataset(test.features, test.labels, n_classes),
    )


def build_split(cfg: ExperimentConfig, ds: LabeledDataset, seed: int) -> ForgetSplit:
    scenario = cfg.scenario
    if isinstance(scenario, RandomScenario):
        return split_random(ds, scenario.fraction, derive_seed(seed, "split"))
    try:
        return split_classwise(ds, scenario.class_label)
    except UnknownClassError as exc:
        raise ConfigError("scenario.class_label", str(exc)) from exc


@dataclass
class SeedContext:
    """Everything a seed's runs share: data, architecture, split and training setup."""

    cfg: ExperimentConfig
    seed: int
    train_ds: LabeledDataset
    test_ds: LabeledDataset
    arch: MlpArchitecture
    split: ForgetSplit
    hyper: TrainHyper
    init_seed: int
    attack_seed: int

    @classmethod
    def build(cls, cfg: ExperimentConfig, seed: int) -> "SeedContext":
        train_ds, test_ds = build_datasets(cfg, seed)
        arch = MlpArchitecture(
            layer_widths=[
                train_ds.n_features,
                *cfg.architecture.hidden_widths,
                train_ds.n_classes,
            ],
            activation=cfg.architecture.activation,
        )
        hyper = TrainHyper(
            eta=cfg.train.eta,
            epochs=cfg.train.epochs,
            batch_size=cfg.train.batch_size,
            shuffle_seed=derive_seed(seed, "train_shuffle"),
        )
        return cls(
            cfg=cfg,
            seed=seed,
            train_ds=train_ds,
            test_ds=test_ds,
            arch=arch,
            split=build_split(cfg, train_ds, seed),
            hyper=hyper,
            init_seed=derive_seed(seed, "init"),
            attack_seed=derive_seed(seed, "mia"),
        )

    def evaluate(
        self, method: str, params: ParamVector, rte_seconds: float = 0.0
    ) -> MetricsReport:
        return evaluate_model(
            self.arch,
            params,
            self.train_ds,
            self.split,
            self.test_ds,
            method=method,
            seed=self.seed,
            attack_seed=self.attack_seed,
            mia=self.cfg.mia,
            rte_seconds=rte_seconds,
        )


@dataclass
class MethodOutcome:
    method: UnlearnMethod
    arch: MlpArchitecture
    params: ParamVector
    trace: UnlearnTrace
    report: MetricsReport
    gap: GapReport
    plan: Optional[CurriculumPlan] = None
    scores: Optional[DifficultyScores] = None


@dataclass
class SeedResult:
    seed: int
    split: ForgetSplit
    original_params: ParamVector
    outcomes: dict[UnlearnMethod, MethodOutcome] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Pipeline steps
# ---------------------------------------------------------------------------


def train_original(ctx: SeedContext) -> ParamVector:
    """θ_D*: ERM on the full training set."""
    params, curve = train_erm(
        ctx.arch, init_params(ctx.arch, ctx.init_seed), ctx.train_ds, ctx.hyper
    )
    logger.info("Seed %d: trained original model, final loss %.6f", ctx.seed, curve[-1])
    return params


def run_retrain(ctx: SeedContext) -> tuple[ParamVector, UnlearnTrace, float]:
    """θ_Dr* from the same θ_0; the trace compares every epoch with the final weights."""
    snapshots: list[ParamVector] = []
    params, rte = timed_call(
        lambda: retrain(
            ctx.arch,
            ctx.init_seed,
            ctx.split,
            ctx.train_ds,
            ctx.hyper,
            on_epoch=lambda _epoch, p: snapshots.append(p.copy()),
        )
    )
    trace = UnlearnTrace()
    for epoch, snapshot in enumerate(snapshots, start=1):
        trace.append(
            epoch_record(ctx.arch, snapshot, ctx.train_ds, ctx.split, epoch, reference=params)
        )
    return params, trace, rte


def plan_curriculum(
    ctx: SeedContext, original: ParamVector, ucfg: UnlearnConfig
) -> tuple[CurriculumPlan, DifficultyScores]:
    curriculum = ctx.cfg.curriculum
    scores = difficulty_scores(
        ctx.arch, original, ctx.train_ds, ctx.split.forget_ids, curriculum.measure
    )
    plan = build_plan(scores, ucfg.n_criteria, curriculum.strategy, curriculum.measure)
    return plan, scores


@dataclass
class MethodRun:
    params: ParamVector
    trace: UnlearnTrace
    rte_seconds: float
    plan: Optional[CurriculumPlan] = None
    scores: Optional[DifficultyScores] = None


def run_method(
    ctx: SeedContext,
    method: UnlearnMethod,
    original: ParamVector,
    reference: Optional[ParamVector] = None,
) -> MethodRun:
    """One unlearning run; RTE covers difficulty scoring and planning for CUFG."""
    ucfg = resolve_unlearn_config(ctx.cfg, method, ctx.seed)

    def unlearn() -> MethodRun:
        plan: Optional[CurriculumPlan] = None
        scores: Optional[DifficultyScores] = None
        if method == UnlearnMethod.CUFG:
            plan, scores = plan_curriculum(ctx, original, ucfg)
        params, trace = run_unlearning(
            ctx.arch, original, ctx.train_ds, ctx.split, ucfg, plan, reference
        )
        return MethodRun(params=params, trace=trace, rte_seconds=0.0, plan=plan, scores=scores)

    run, rte = timed_call(unlearn)
    run.rte_seconds = rte
    logger.info(
        "Seed %d: %s finished %d epochs (%d corrections) in %.3fs",
        ctx.seed,
        method.value,
        ucfg.epochs,
        run.trace.total_corrections,
        rte,
    )
    return run


def run_seed(cfg: ExperimentConfig, seed: int, out_dir: Union[str, Path]) -> SeedResult:
    """Full pipeline for one seed; writes that seed's artifacts."""
    ctx = SeedContext.build(cfg, seed)
    logger.info(
        "Seed %d: %d train / %d test samples, |D_f| = %d, arch %s",
        seed,
        len(ctx.train_ds),
        len(ctx.test_ds),
        ctx.split.forget_ids.size,
        ctx.arch.layer_widths,
    )
    original = train_original(ctx)
    result = SeedResult(seed=seed, split=ctx.split, original_params=original)

    retrain_params, retrain_trace, retrain_rte = run_retrain(ctx)
    reference = ctx.evaluate(UnlearnMethod.RETRAIN.value, retrain_params, retrain_rte)
    result.outcomes[UnlearnMethod.RETRAIN] = MethodOutcome(
        method=UnlearnMethod.RETRAIN,
        arch=ctx.arch,
        params=retrain_params,
        trace=retrain_trace,
        report=reference,
        gap=avg_gap(reference, reference),
    )

    for method in cfg.unlearning_methods:
        run = run_method(ctx, method, original, retrain_params)
        report = ctx.evaluate(method.value, run.params, run.rte_seconds)
        result.outcomes[method] = MethodOutcome(
            method=method,
            arch=ctx.arch,
            params=run.params,
            trace=run.trace,
            report=report,
            gap=avg_gap(report, reference),
            plan=run.plan,
            scores=run.scores,
        )

    for outcome in result.outcomes.values():
        reports.write_method_artifacts(out_dir, seed, outcome, cfg.curriculum.histogram_bins)
    return result


# ---------------------------------------------------------------------------
# Experiment
# ---------------------------------------------------------------------------


@dataclass
class ExperimentResult:
    output_dir: Path
    seeds: list[SeedResult]

    def outcome(self, seed: int, method: UnlearnMethod) -> MethodOutcome:
        for result in self.seeds:
            if result.seed == seed:
                return result.outcomes[method]
        raise KeyError(seed)


def run_experiment(
    cfg: ExperimentConfig,
    output_dir: Optional[Union[str, Path]] = None,
    threads: Optional[int] = None,
) -> ExperimentResult:
    """Run every seed (in parallel when threads > 1) and write the summaries.

    Seed results are collected in config order, so summaries do not depend on
    scheduling.
    """
    out = Path(output_dir if output_dir is not None else cfg.output_dir)
    workers = max(1, threads if threads is not None else settings.UNLEARN_THREADS)
    logger.info(
        "Running %d seed(s) x %d method(s) into %s (%d thread(s))",
        len(cfg.seeds),
        len(cfg.unlearning_methods) + 1,
        out,
        workers,
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda s: run_seed(cfg, s, out), cfg.seeds))
    reports.write_summaries(out, results)
    return ExperimentResult(output_dir=out, seeds=results)
