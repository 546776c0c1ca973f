"""Hyperparameter sweeps: one full experiment per value, long-format results.

The sweep table has one row per (value, method, seed, metric) so it can be
fed straight into box-plot tooling::

    parameter,value,method,seed,metric,score
    gamma,0.2617993877991494,ufg,0,ua,3.3333333333333286
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import pandas as pd

from app.core.config import DEFAULT_GAMMA_GRID
from app.core.errors import ConfigError
from app.harness.experiment import ExperimentResult, parse_config, run_experiment
from app.harness.reports import write_csv
from app.models.schema import (
    HALF_PI,
    ExperimentConfig,
    RandomScenario,
    SweepParameter,
    UnlearnMethod,
)

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["parameter", "value", "method", "seed", "metric", "score"]

# Methods whose behaviour depends on gamma.
_GAMMA_METHODS = (UnlearnMethod.UFG, UnlearnMethod.CUFG)


def default_values(parameter: SweepParameter) -> list[float]:
    if parameter == SweepParameter.GAMMA:
        return list(DEFAULT_GAMMA_GRID)
    raise ConfigError(
        "values", f"no default grid for {parameter.value}; pass values explicitly"
    )


def check_values(
    cfg: ExperimentConfig, parameter: SweepParameter, values: Sequence[float]
) -> None:
    """Reject illegal sweep values before any run starts."""
    if not values:
        raise ConfigError("values", "at least one value is required")
    for index, value in enumerate(values):
        where = f"values.{index}"
        if not math.isfinite(value):
            raise ConfigError(where, f"{value} is not finite")
        if parameter == SweepParameter.GAMMA and not 0.0 <= value <= HALF_PI:
            raise ConfigError(where, f"gamma {value} outside [0, pi/2]")
        if parameter == SweepParameter.N_CRITERIA and (value < 1 or value != int(value)):
            raise ConfigError(where, f"n_criteria {value} is not a positive integer")
        if parameter == SweepParameter.FORGET_FRACTION:
            if not isinstance(cfg.scenario, RandomScenario):
                raise ConfigError("scenario", "forget_fraction sweeps need a random scenario")
            if not 0.0 < value < 1.0:
                raise ConfigError(where, f"forget fraction {value} outside (0, 1)")


def config_for_value(
    cfg: ExperimentConfig, parameter: SweepParameter, value: float
) -> ExperimentConfig:
    """Copy of *cfg* with *parameter* set to *value*, re-validated."""
    raw: dict[str, Any] = cfg.model_dump(mode="json")
    if parameter == SweepParameter.GAMMA:
        for method in _GAMMA_METHODS:
            raw["unlearn"].setdefault(method.value, {})["gamma"] = float(value)
    elif parameter == SweepParameter.N_CRITERIA:
        raw["curriculum"]["n_criteria"] = int(value)
    else:
        raw["scenario"]["fraction"] = float(value)
    return parse_config(raw)


def long_rows(
    parameter: SweepParameter, value: float, result: ExperimentResult
) -> list[dict[str, Any]]:
    """Long-format rows; ``forget_size`` is reported alongside the metrics."""
    rows = []
    for seed_result in result.seeds:
        forget_size = int(seed_result.split.forget_ids.size)
        for method, outcome in seed_result.outcomes.items():
            scores = {
                "ua": outcome.report.ua,
                "ra": outcome.report.ra,
                "ta": outcome.report.ta,
                "mia": outcome.report.mia,
                "avg_gap": outcome.gap.avg_gap,
                "forget_size": float(forget_size),
            }
            for metric, score in scores.items():
                rows.append(
                    {
                        "parameter": parameter.value,
                        "value": value,
                        "method": method.value,
                        "seed": seed_result.seed,
                        "metric": metric,
                        "score": score,
                    }
                )
    return rows


def run_sweep(
    cfg: ExperimentConfig,
    parameter: SweepParameter,
    values: Optional[Sequence[float]] = None,
    output_dir: Optional[Union[str, Path]] = None,
    threads: Optional[int] = None,
) -> pd.DataFrame:
    """Run the experiment once per value and write ``sweep_<parameter>.csv``.

    Per-value artifacts land in ``<out>/sweep_<parameter>/value_<i>/``.
    """
    grid = list(values) if values is not None else default_values(parameter)
    check_values(cfg, parameter, grid)
    configs = [config_for_value(cfg, parameter, v) for v in grid]

    out = Path(output_dir if output_dir is not None else cfg.output_dir)
    rows: list[dict[str, Any]] = []
    for index, (value, value_cfg) in enumerate(zip(grid, configs)):
        logger.info("Sweep %s: value %d/%d = %s", parameter.value, index + 1, len(grid), value)
        value_dir = out / f"sweep_{parameter.value}" / f"value_{index}"
        result = run_experiment(value_cfg, value_dir, threads)
        rows.extend(long_rows(parameter, value, result))

    table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    write_csv(out / f"sweep_{parameter.value}.csv", table)
    return table
