"""End-to-end tests for the experiment pipeline, its artifacts and sweeps."""

import json

import numpy as np
import pandas as pd
import pytest

from app.core.errors import ConfigError
from app.harness.experiment import (
    build_datasets,
    build_split,
    parse_config,
    run_experiment,
    with_methods,
)
from app.harness.reports import SUMMARY_COLUMNS
from app.harness.sweep import run_sweep
from app.models import SweepParameter, UnlearnMethod
from app.unlearning.trace import TRACE_COLUMNS
from tests.integration.conftest import tiny_config_dict

DETERMINISTIC_FILES = ("report.json", "trace.csv", "model.json", "plan.json", "score_histogram.csv")


def _files(root):
    return sorted(
        p.relative_to(root)
        for p in root.rglob("*")
        if p.is_file() and p.name in DETERMINISTIC_FILES + ("summary.csv",)
    )


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------


class TestArtifacts:
    def test_layout_for_every_method(self, tiny_config, tmp_path):
        result = run_experiment(tiny_config, tmp_path)
        for seed in (0, 1):
            for method in ("retrain", "ft", "ga", "ufg", "cufg"):
                directory = tmp_path / f"seed_{seed}" / method
                for name in ("report.json", "trace.csv", "model.json"):
                    assert (directory / name).is_file(), f"{directory / name} missing"
            assert (tmp_path / f"seed_{seed}" / "cufg" / "plan.json").is_file()
            assert (tmp_path / f"seed_{seed}" / "cufg" / "score_histogram.csv").is_file()
            assert not (tmp_path / f"seed_{seed}" / "ufg" / "plan.json").exists()
        assert [r.seed for r in result.seeds] == [0, 1]

    def test_trace_files(self, tiny_config, tmp_path):
        run_experiment(tiny_config, tmp_path)
        trace = pd.read_csv(tmp_path / "seed_0" / "cufg" / "trace.csv")
        assert list(trace.columns) == TRACE_COLUMNS
        assert trace["epoch"].tolist() == list(range(1, 11))
        assert trace["criterion_index"].tolist() == [0] * 5 + [1] * 5
        retrain = pd.read_csv(tmp_path / "seed_0" / "retrain" / "trace.csv")
        assert len(retrain) == tiny_config.train.epochs
        assert retrain["cos_sim_to_reference"].iloc[-1] == pytest.approx(1.0)

    def test_plan_document_covers_forget_set(self, tiny_config, tmp_path):
        result = run_experiment(tiny_config, tmp_path)
        plan = json.loads((tmp_path / "seed_0" / "cufg" / "plan.json").read_text())
        ids = sorted(i for criterion in plan["criteria"] for i in criterion)
        assert ids == result.seeds[0].split.forget_ids.tolist()
        assert len(plan["criteria"]) == 2

    def test_fine_tuning_only(self, tmp_path):
        cfg = parse_config(tiny_config_dict(methods=["ft"], seeds=[3]))
        run_experiment(cfg, tmp_path)
        assert (tmp_path / "seed_3" / "ft" / "report.json").is_file()
        assert (tmp_path / "seed_3" / "retrain" / "report.json").is_file()
        assert not (tmp_path / "seed_3" / "cufg").exists()


# ---------------------------------------------------------------------------
# Config helpers
# ---------------------------------------------------------------------------


class TestConfigHelpers:
    def test_with_methods_keeps_the_rest(self, tiny_config):
        cfg = with_methods(tiny_config, [UnlearnMethod.UFG])
        assert cfg.unlearning_methods == [UnlearnMethod.UFG]
        assert cfg.seeds == tiny_config.seeds
        assert cfg.unlearn == tiny_config.unlearn

    def test_absent_forget_class_is_a_config_error(self):
        cfg = parse_config(tiny_config_dict(scenario={"kind": "class", "class_label": 7}))
        train_ds, _ = build_datasets(cfg, 0)
        with pytest.raises(ConfigError) as info:
            build_split(cfg, train_ds, 0)
        assert info.value.field_path == "scenario.class_label"


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------


class TestSummaries:
    def test_summary_gap_arithmetic(self, tiny_config, tmp_path):
        run_experiment(tiny_config, tmp_path)
        summary = pd.read_csv(tmp_path / "summary.csv")
        assert list(summary.columns) == SUMMARY_COLUMNS
        assert len(summary) == 2 * 5
        gaps = summary[["ua_gap", "ra_gap", "ta_gap", "mia_gap"]].mean(axis=1)
        assert np.allclose(summary["avg_gap"], gaps)
        retrain = summary[summary["method"] == "retrain"]
        assert (retrain["avg_gap"] == 0.0).all()

    def test_gaps_match_reports(self, tiny_config, tmp_path):
        result = run_experiment(tiny_config, tmp_path)
        ref = result.outcome(1, UnlearnMethod.RETRAIN).report
        ufg = result.outcome(1, UnlearnMethod.UFG)
        assert ufg.gap.ua_gap == pytest.approx(abs(ufg.report.ua - ref.ua))
        assert ufg.gap.mia_gap == pytest.approx(abs(ufg.report.mia - ref.mia))

    def test_runtime_only_in_runtime_csv(self, tiny_config, tmp_path):
        run_experiment(tiny_config, tmp_path)
        runtime = pd.read_csv(tmp_path / "runtime.csv")
        assert (runtime["rte_seconds"] >= 0).all()
        assert "rte_seconds" not in pd.read_csv(tmp_path / "summary.csv").columns

    def test_summary_table(self, tiny_config, tmp_path):
        run_experiment(tiny_config, tmp_path)
        table = pd.read_csv(tmp_path / "summary_table.csv")
        assert table["method"].tolist() == ["retrain", "ft", "ga", "ufg", "cufg"]
        assert (table["n_seeds"] == 2).all()
        assert table.loc[0, "UA"].endswith("(0.00)")


# ---------------------------------------------------------------------------
# Determinism
# ---------------------------------------------------------------------------


class TestDeterminism:
    def test_repeated_runs_are_byte_identical(self, tiny_config, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        run_experiment(tiny_config, first)
        run_experiment(tiny_config, second, threads=2)
        names = _files(first)
        assert names == _files(second)
        assert names
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


def _scores(table, method):
    rows = table[table["method"] == method].sort_values(["seed", "metric"])
    return rows["score"].tolist()


class TestSweeps:
    def test_zero_gamma_makes_ufg_match_ft(self, tmp_path):
        cfg = parse_config(tiny_config_dict(methods=["retrain", "ft", "ufg"], seeds=[0]))
        table = run_sweep(cfg, SweepParameter.GAMMA, [0.0], tmp_path)
        assert _scores(table, "ufg") == _scores(table, "ft")
        assert (tmp_path / "sweep_gamma.csv").is_file()
        assert (tmp_path / "sweep_gamma" / "value_0" / "summary.csv").is_file()

    def test_single_criterion_makes_cufg_match_ufg(self, tmp_path):
        raw = tiny_config_dict(methods=["retrain", "ufg", "cufg"], seeds=[0], unlearn={})
        table = run_sweep(parse_config(raw), SweepParameter.N_CRITERIA, [1], tmp_path)
        assert _scores(table, "cufg") == _scores(table, "ufg")

    def test_forget_fraction_scales_forget_set(self, tmp_path):
        cfg = parse_config(tiny_config_dict(methods=["retrain", "ft"], seeds=[0]))
        table = run_sweep(cfg, SweepParameter.FORGET_FRACTION, [0.1, 0.5], tmp_path)
        sizes = (
            table[(table["metric"] == "forget_size") & (table["method"] == "ft")]
            .set_index("value")["score"]
        )
        assert sizes[0.5] / sizes[0.1] == pytest.approx(5.0)

    def test_long_format_columns(self, tmp_path):
        cfg = parse_config(tiny_config_dict(methods=["retrain", "ufg"], seeds=[0]))
        table = run_sweep(cfg, SweepParameter.GAMMA, [0.2, 0.6], tmp_path)
        assert list(table.columns) == ["parameter", "value", "method", "seed", "metric", "score"]
        assert set(table["value"]) == {0.2, 0.6}
        assert set(table["metric"]) == {"ua", "ra", "ta", "mia", "avg_gap", "forget_size"}

    def test_fraction_sweep_needs_random_scenario(self, tmp_path):
        from app.core.errors import ConfigError

        raw = tiny_config_dict(scenario={"kind": "class", "class_label": 0}, seeds=[0])
        with pytest.raises(ConfigError):
            run_sweep(parse_config(raw), SweepParameter.FORGET_FRACTION, [0.2], tmp_path)

    def test_gamma_outside_range(self, tiny_config, tmp_path):
        from app.core.errors import ConfigError

        with pytest.raises(ConfigError):
            run_sweep(tiny_config, SweepParameter.GAMMA, [2.0], tmp_path)
