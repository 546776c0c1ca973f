"""Command-line entry point.

Usage:
  python -m app.main experiment --config configs/desk_random.json --out results
  python -m app.main sweep --config configs/desk_random.json --parameter gamma
  python -m app.main sweep --config configs/desk_random.json \
      --parameter forget_fraction --values 0.1,0.5

  # Step by step, sharing one output directory:
  python -m app.main train   --config configs/desk_random.json --seed 0
  python -m app.main unlearn --config configs/desk_random.json --seed 0 --method retrain
  python -m app.main unlearn --config configs/desk_random.json --seed 0 --method ufg
  python -m app.main eval    --config configs/desk_random.json --seed 0

Exit codes: 0 success, 2 configuration error, 1 any other failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from app.core.config import settings
from app.core.errors import (
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    CheckpointError,
    ConfigError,
    exit_code_for,
)
from app.evaluation.metrics import avg_gap
from app.harness import reports
from app.harness.experiment import (
    SeedContext,
    load_config,
    run_experiment,
    run_method,
    run_retrain,
    train_original,
    with_methods,
    with_seeds,
)
from app.harness.sweep import run_sweep
from app.models.schema import ExperimentConfig, SweepParameter, UnlearnMethod
from app.nn.mlp import ParamVector
from app.training.checkpoint import load_checkpoint, save_checkpoint

logger = logging.getLogger(__name__)

ORIGINAL = "original"


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _resolve(args: argparse.Namespace) -> tuple[ExperimentConfig, Path]:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = with_seeds(cfg, [args.seed])
    if args.method is not None:
        cfg = with_methods(cfg, [UnlearnMethod(args.method)])
    out = Path(args.out) if args.out else Path(cfg.output_dir)
    return cfg, out


def _methods(cfg: ExperimentConfig, name: Optional[str]) -> list[UnlearnMethod]:
    if name is not None:
        return [UnlearnMethod(name)]
    return [UnlearnMethod.RETRAIN, *cfg.unlearning_methods]


def _checkpoint_path(out: Path, seed: int, name: str) -> Path:
    return reports.method_dir(out, seed, name) / "model.json"


def _load_params(ctx: SeedContext, path: Path) -> ParamVector:
    arch, seed, params = load_checkpoint(path)
    if arch != ctx.arch or seed != ctx.seed:
        raise CheckpointError(
            str(path),
            [
                f"checkpoint is for arch {arch.layer_widths} seed {seed}, "
                f"config needs {ctx.arch.layer_widths} seed {ctx.seed}"
            ],
        )
    return params


def _original(ctx: SeedContext, out: Path) -> ParamVector:
    """θ_D* from ``train`` output, or trained (and saved) on the spot."""
    path = _checkpoint_path(out, ctx.seed, ORIGINAL)
    if path.exists():
        return _load_params(ctx, path)
    params = train_original(ctx)
    save_checkpoint(path, ctx.arch, ctx.seed, params)
    return params


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_train(args: argparse.Namespace) -> int:
    cfg, out = _resolve(args)
    for seed in cfg.seeds:
        ctx = SeedContext.build(cfg, seed)
        save_checkpoint(
            _checkpoint_path(out, seed, ORIGINAL), ctx.arch, seed, train_original(ctx)
        )
    return EXIT_OK


def cmd_unlearn(args: argparse.Namespace) -> int:
    cfg, out = _resolve(args)
    methods = _methods(cfg, args.method)
    for seed in cfg.seeds:
        ctx = SeedContext.build(cfg, seed)
        original = _original(ctx, out)
        retrain_path = _checkpoint_path(out, seed, UnlearnMethod.RETRAIN.value)
        reference = _load_params(ctx, retrain_path) if retrain_path.exists() else None
        for method in methods:
            directory = reports.method_dir(out, seed, method.value)
            if method == UnlearnMethod.RETRAIN:
                params, trace, _ = run_retrain(ctx)
                reference = params
            else:
                run = run_method(ctx, method, original, reference)
                params, trace = run.params, run.trace
                if run.plan is not None and run.scores is not None:
                    reports.write_plan_artifacts(
                        directory, run.plan, run.scores, cfg.curriculum.histogram_bins
                    )
            save_checkpoint(directory / "model.json", ctx.arch, seed, params)
            trace.write_csv(directory / "trace.csv")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    cfg, out = _resolve(args)
    methods = _methods(cfg, args.method)
    for seed in cfg.seeds:
        ctx = SeedContext.build(cfg, seed)
        retrain_path = _checkpoint_path(out, seed, UnlearnMethod.RETRAIN.value)
        if not retrain_path.exists():
            raise CheckpointError(
                str(retrain_path), ["missing; run `unlearn --method retrain` first"]
            )
        reference = ctx.evaluate(
            UnlearnMethod.RETRAIN.value, _load_params(ctx, retrain_path)
        )
        for method in methods:
            if method == UnlearnMethod.RETRAIN:
                report = reference
            else:
                path = _checkpoint_path(out, seed, method.value)
                report = ctx.evaluate(method.value, _load_params(ctx, path))
            reports.write_report(
                reports.method_dir(out, seed, method.value),
                report,
                avg_gap(report, reference),
            )
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    cfg, out = _resolve(args)
    result = run_experiment(cfg, out)
    summary = reports.summary_table(reports.summary_frame(result.seeds))
    print(summary.to_string(index=False))
    return EXIT_OK


def _parse_values(text: Optional[str]) -> Optional[list[float]]:
    if text is None:
        return None
    values = []
    for index, item in enumerate(text.split(",")):
        try:
            values.append(float(item))
        except ValueError as exc:
            raise ConfigError(f"values.{index}", f"{item!r} is not a number") from exc
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg, out = _resolve(args)
    table = run_sweep(cfg, SweepParameter(args.parameter), _parse_values(args.values), out)
    logger.info("Sweep produced %d rows", len(table))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unlearn-toolkit",
        description=f"{settings.PROJECT_NAME} {settings.VERSION}",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    methods = [m.value for m in UnlearnMethod]

    def add(
        name: str, help_text: str, handler: Callable[[argparse.Namespace], int]
    ) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="Experiment config (JSON)")
        p.add_argument("--out", default=None, help="Output directory (default: config)")
        p.add_argument("--seed", type=int, default=None, help="Run only this seed")
        p.add_argument(
            "--method", choices=methods, default=None, help="Run only this method"
        )
        p.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
        p.set_defaults(handler=handler)
        return p

    add("train", "Train the original model for each seed", cmd_train)
    add("unlearn", "Run unlearning methods from the trained model", cmd_unlearn)
    add("eval", "Evaluate saved models against Retrain", cmd_eval)
    add("experiment", "Full pipeline for every seed and method", cmd_experiment)
    sweep = add("sweep", "One experiment per hyperparameter value", cmd_sweep)
    sweep.add_argument(
        "--parameter", required=True, choices=[p.value for p in SweepParameter]
    )
    sweep.add_argument(
        "--values", default=None, help="Comma-separated values (gamma has a default grid)"
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which is also our config-error code.
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except Exception as exc:
        code = exit_code_for(exc)
        if code == EXIT_CONFIG_ERROR:
            logger.error("Configuration error: %s", exc)
        else:
            logger.error("%s failed: %s", args.command, exc)
            logger.debug("Traceback", exc_info=True)
        return code


if __name__ == "__main__":
    sys.exit(main())
