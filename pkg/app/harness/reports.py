"""Artifact writers for experiment outputs.

Everything written here is a pure function of the experiment config: JSON is
dumped with sorted keys, CSV floats with 17 significant digits. Wall-clock
runtimes go to ``runtime.csv`` only.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any, Iterable, Union

import pandas as pd

from app.curriculum.difficulty import DifficultyScores
from app.curriculum.plan import CurriculumPlan, export_score_histogram, plan_to_document
from app.models.schema import GapReport, MetricsReport
from app.training.checkpoint import save_checkpoint

if TYPE_CHECKING:
    from app.harness.experiment import MethodOutcome, SeedResult

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "method",
    "seed",
    "ua",
    "ra",
    "ta",
    "mia",
    "ua_gap",
    "ra_gap",
    "ta_gap",
    "mia_gap",
    "avg_gap",
]
RUNTIME_COLUMNS = ["method", "seed", "rte_seconds"]

# Column label and the summary.csv columns behind each table cell.
_TABLE_CELLS = [
    ("UA", "ua", "ua_gap"),
    ("RA", "ra", "ra_gap"),
    ("TA", "ta", "ta_gap"),
    ("MIA", "mia", "mia_gap"),
]


def seed_dir(out_dir: Union[str, Path], seed: int) -> Path:
    return Path(out_dir) / f"seed_{seed}"


def method_dir(out_dir: Union[str, Path], seed: int, method: str) -> Path:
    return seed_dir(out_dir, seed) / method


# ---------------------------------------------------------------------------
# Low-level writers
# ---------------------------------------------------------------------------


def write_json(path: Union[str, Path], document: Any) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + "\n")
    logger.info("Wrote %s", target)
    return target


def write_csv(path: Union[str, Path], frame: pd.DataFrame) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(target, index=False, float_format="%.17g", na_rep="")
    logger.info("Wrote %s", target)
    return target


# ---------------------------------------------------------------------------
# Per-method artifacts
# ---------------------------------------------------------------------------


def report_document(report: MetricsReport, gap: GapReport) -> dict[str, Any]:
    return {
        "metrics": report.model_dump(mode="json", exclude={"rte_seconds"}),
        "gap": gap.model_dump(mode="json"),
    }


def write_report(directory: Union[str, Path], report: MetricsReport, gap: GapReport) -> Path:
    return write_json(Path(directory) / "report.json", report_document(report, gap))


def write_plan_artifacts(
    directory: Union[str, Path],
    plan: CurriculumPlan,
    scores: DifficultyScores,
    bins: int,
) -> None:
    """plan.json and score_histogram.csv for one CUFG run."""
    directory = Path(directory)
    write_json(directory / "plan.json", plan_to_document(plan))
    write_csv(directory / "score_histogram.csv", export_score_histogram(scores, bins))


def write_method_artifacts(
    out_dir: Union[str, Path], seed: int, outcome: "MethodOutcome", histogram_bins: int
) -> None:
    directory = method_dir(out_dir, seed, outcome.method.value)
    write_report(directory, outcome.report, outcome.gap)
    outcome.trace.write_csv(directory / "trace.csv")
    save_checkpoint(directory / "model.json", outcome.arch, seed, outcome.params)
    if outcome.plan is not None and outcome.scores is not None:
        write_plan_artifacts(directory, outcome.plan, outcome.scores, histogram_bins)


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------


def summary_frame(results: Iterable["SeedResult"]) -> pd.DataFrame:
    """One row per (method, seed): metrics and gaps to the same-seed Retrain."""
    rows = []
    for result in results:
        for outcome in result.outcomes.values():
            rows.append(
                {
                    **outcome.report.model_dump(exclude={"rte_seconds"}),
                    **outcome.gap.model_dump(exclude={"method", "reference_method", "seed"}),
                }
            )
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def runtime_frame(results: Iterable["SeedResult"]) -> pd.DataFrame:
    rows = [
        {
            "method": outcome.report.method,
            "seed": outcome.report.seed,
            "rte_seconds": outcome.report.rte_seconds,
        }
        for result in results
        for outcome in result.outcomes.values()
    ]
    return pd.DataFrame(rows, columns=RUNTIME_COLUMNS)


def summary_table(summary: pd.DataFrame) -> pd.DataFrame:
    """Mean over seeds per method, laid out as "metric (gap)" cells plus Avg.Gap."""
    means = summary.groupby("method", sort=False).mean(numeric_only=True)
    rows = []
    for method, row in means.iterrows():
        entry: dict[str, Any] = {
            "method": method,
            "n_seeds": int((summary["method"] == method).sum()),
        }
        for label, metric, gap in _TABLE_CELLS:
            entry[label] = f"{row[metric]:.2f} ({row[gap]:.2f})"
        entry["Avg.Gap"] = f"{row['avg_gap']:.2f}"
        rows.append(entry)
    return pd.DataFrame(rows, columns=["method", "n_seeds", "UA", "RA", "TA", "MIA", "Avg.Gap"])


def write_summaries(out_dir: Union[str, Path], results: list["SeedResult"]) -> pd.DataFrame:
    """summary.csv, summary_table.csv and runtime.csv; returns the summary frame."""
    out = Path(out_dir)
    summary = summary_frame(results)
    write_csv(out / "summary.csv", summary)
    write_csv(out / "summary_table.csv", summary_table(summary))
    write_csv(out / "runtime.csv", runtime_frame(results))
    return summary
