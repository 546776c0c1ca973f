"""Tests for the typed config and report models.

Covers:
  - Architecture / hyperparameter models and their bounds
  - UnlearnConfig gamma range and CUFG epoch divisibility
  - ExperimentConfig parsing: defaults, unknown keys, discriminated unions
  - ConfigError field paths produced by load_config / parse_config
  - Per-method unlearning defaults and overrides
  - Sub-seed derivation
  - Exit-code mapping
"""

import json
import math

import pytest
from pydantic import ValidationError

from app.core.config import (
    DEFAULT_GA_EPOCHS,
    DEFAULT_GAMMA,
    DEFAULT_UNLEARN_EPOCHS,
    default_cufg_epochs,
)
from app.core.errors import (
    EXIT_CONFIG_ERROR,
    EXIT_RUNTIME_ERROR,
    ConfigError,
    EmptySetError,
    exit_code_for,
)
from app.harness.experiment import (
    derive_seed,
    load_config,
    parse_config,
    resolve_unlearn_config,
    with_seeds,
)
from app.models import (
    CURRENT_SCHEMA_VERSION,
    Activation,
    BlobsDatasetSpec,
    ClassScenario,
    ExperimentConfig,
    MetricsReport,
    MlpArchitecture,
    RandomScenario,
    TrainHyper,
    UnlearnConfig,
    UnlearnMethod,
)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture()
def raw_config() -> dict:
    return {
        "dataset": {
            "kind": "blobs",
            "n_per_class": 20,
            "n_classes": 3,
            "n_features": 2,
            "spread": 0.35,
        },
        "scenario": {"kind": "random", "fraction": 0.1},
        "methods": ["retrain", "ft", "ufg", "cufg"],
        "seeds": [0, 1],
    }


# ---------------------------------------------------------------------------
# Model / optimisation types
# ---------------------------------------------------------------------------


class TestMlpArchitecture:
    def test_properties(self):
        arch = MlpArchitecture(layer_widths=[2, 16, 3])
        assert arch.n_inputs == 2
        assert arch.n_classes == 3
        assert arch.n_params == 99
        assert arch.activation == Activation.RELU

    def test_needs_two_layers(self):
        with pytest.raises(ValidationError):
            MlpArchitecture(layer_widths=[4])

    def test_rejects_zero_width(self):
        with pytest.raises(ValidationError):
            MlpArchitecture(layer_widths=[2, 0, 3])

    def test_frozen(self):
        arch = MlpArchitecture(layer_widths=[2, 3])
        with pytest.raises(ValidationError):
            arch.activation = Activation.TANH


class TestUnlearnConfig:
    def test_defaults(self):
        cfg = UnlearnConfig(method=UnlearnMethod.UFG, eta=0.01, epochs=10)
        assert cfg.gamma == pytest.approx(math.pi / 3)
        assert cfg.n_criteria == 3

    @pytest.mark.parametrize("gamma", [-0.1, math.pi / 2 + 1e-9])
    def test_gamma_range(self, gamma):
        with pytest.raises(ValidationError):
            UnlearnConfig(method=UnlearnMethod.UFG, eta=0.01, epochs=10, gamma=gamma)

    def test_gamma_bounds_inclusive(self):
        UnlearnConfig(method=UnlearnMethod.UFG, eta=0.01, epochs=1, gamma=0.0)
        UnlearnConfig(method=UnlearnMethod.UFG, eta=0.01, epochs=1, gamma=math.pi / 2)

    def test_cufg_epochs_must_divide(self):
        with pytest.raises(ValidationError, match="divisible"):
            UnlearnConfig(method=UnlearnMethod.CUFG, eta=0.01, epochs=10, n_criteria=3)

    def test_divisibility_only_applies_to_cufg(self):
        cfg = UnlearnConfig(method=UnlearnMethod.UFG, eta=0.01, epochs=10, n_criteria=3)
        assert cfg.epochs == 10

    def test_non_positive_eta(self):
        with pytest.raises(ValidationError):
            UnlearnConfig(method=UnlearnMethod.FT, eta=0.0, epochs=10)


class TestReports:
    def test_percentages_bounded(self):
        with pytest.raises(ValidationError):
            MetricsReport(method="ft", seed=0, ua=101.0, ra=0.0, ta=0.0, mia=0.0)

    def test_train_hyper_needs_an_epoch(self):
        with pytest.raises(ValidationError):
            TrainHyper(eta=0.1, epochs=0, batch_size=8)


# ---------------------------------------------------------------------------
# Experiment config
# ---------------------------------------------------------------------------


class TestExperimentConfig:
    def test_minimal_config_fills_defaults(self, raw_config):
        cfg = parse_config(raw_config)
        assert cfg.schema_version == CURRENT_SCHEMA_VERSION
        assert isinstance(cfg.dataset, BlobsDatasetSpec)
        assert isinstance(cfg.scenario, RandomScenario)
        assert cfg.architecture.hidden_widths == [32]
        assert cfg.curriculum.n_criteria == 3
        assert cfg.unlearning_methods == [
            UnlearnMethod.FT,
            UnlearnMethod.UFG,
            UnlearnMethod.CUFG,
        ]

    def test_class_scenario(self, raw_config):
        raw_config["scenario"] = {"kind": "class", "class_label": 2}
        assert parse_config(raw_config).scenario == ClassScenario(class_label=2)

    def test_unknown_key_names_the_field(self, raw_config):
        raw_config["train"] = {"epochs": 5, "momentum": 0.9}
        with pytest.raises(ConfigError) as exc_info:
            parse_config(raw_config)
        assert exc_info.value.field_path == "train.momentum"

    def test_bad_fraction_names_the_field(self, raw_config):
        raw_config["scenario"]["fraction"] = 1.5
        with pytest.raises(ConfigError) as exc_info:
            parse_config(raw_config)
        assert exc_info.value.field_path.startswith("scenario")
        assert exc_info.value.field_path.endswith("fraction")

    def test_unsupported_schema_version(self, raw_config):
        raw_config["schema_version"] = "0.9.0"
        with pytest.raises(ConfigError) as exc_info:
            parse_config(raw_config)
        assert exc_info.value.field_path == "schema_version"

    def test_repeated_methods(self, raw_config):
        raw_config["methods"] = ["ft", "ft"]
        with pytest.raises(ConfigError):
            parse_config(raw_config)

    def test_empty_seeds(self, raw_config):
        raw_config["seeds"] = []
        with pytest.raises(ConfigError) as exc_info:
            parse_config(raw_config)
        assert exc_info.value.field_path == "seeds"

    def test_cufg_override_must_divide(self, raw_config):
        raw_config["unlearn"] = {"cufg": {"epochs": 10}}
        with pytest.raises(ConfigError, match="divisible"):
            parse_config(raw_config)

    def test_default_cufg_epochs_need_no_override(self, raw_config):
        cfg = parse_config(raw_config)
        assert resolve_unlearn_config(cfg, UnlearnMethod.CUFG, 0).epochs == 9

    def test_with_seeds(self, raw_config):
        cfg = with_seeds(parse_config(raw_config), [7])
        assert cfg.seeds == [7]
        assert isinstance(cfg, ExperimentConfig)


class TestLoadConfig:
    def test_loads_file(self, raw_config, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(raw_config))
        assert load_config(path).seeds == [0, 1]

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{\"seeds\": [0,]")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config(path)


# ---------------------------------------------------------------------------
# Unlearning defaults
# ---------------------------------------------------------------------------


class TestResolveUnlearnConfig:
    def test_fine_tuning_defaults(self, raw_config):
        cfg = resolve_unlearn_config(parse_config(raw_config), UnlearnMethod.UFG, 0)
        assert cfg.epochs == DEFAULT_UNLEARN_EPOCHS
        assert cfg.eta == 0.01
        assert cfg.gamma == DEFAULT_GAMMA

    def test_ga_defaults(self, raw_config):
        cfg = resolve_unlearn_config(parse_config(raw_config), UnlearnMethod.GA, 0)
        assert cfg.epochs == DEFAULT_GA_EPOCHS

    def test_shared_shuffle_stream(self, raw_config):
        parsed = parse_config(raw_config)
        ft = resolve_unlearn_config(parsed, UnlearnMethod.FT, 3)
        ufg = resolve_unlearn_config(parsed, UnlearnMethod.UFG, 3)
        assert ft.shuffle_seed == ufg.shuffle_seed

    def test_override_applies(self, raw_config):
        raw_config["unlearn"] = {"ufg": {"gamma": 0.5, "eta": 0.02}}
        cfg = resolve_unlearn_config(parse_config(raw_config), UnlearnMethod.UFG, 0)
        assert cfg.gamma == 0.5
        assert cfg.eta == 0.02
        assert cfg.epochs == DEFAULT_UNLEARN_EPOCHS

    @pytest.mark.parametrize("n,expected", [(1, 10), (2, 10), (3, 9), (4, 12), (7, 7), (30, 30)])
    def test_default_cufg_epochs(self, n, expected):
        assert default_cufg_epochs(n) == expected
        assert default_cufg_epochs(n) % n == 0


class TestDeriveSeed:
    def test_streams_are_independent(self):
        assert derive_seed(0, "init") != derive_seed(0, "split")
        assert derive_seed(0, "init") != derive_seed(1, "init")

    def test_stable(self):
        assert derive_seed(5, "mia") == derive_seed(5, "mia")
        assert 0 <= derive_seed(5, "mia") < 2**64


# ---------------------------------------------------------------------------
# Exit codes
# ---------------------------------------------------------------------------


class TestExitCodes:
    def test_config_error(self):
        assert exit_code_for(ConfigError("seeds", "empty")) == EXIT_CONFIG_ERROR

    def test_validation_error(self):
        with pytest.raises(ValidationError) as exc_info:
            MlpArchitecture(layer_widths=[1])
        assert exit_code_for(exc_info.value) == EXIT_CONFIG_ERROR

    def test_runtime_error(self):
        assert exit_code_for(EmptySetError("forget set")) == EXIT_RUNTIME_ERROR
        assert exit_code_for(RuntimeError("boom")) == EXIT_RUNTIME_ERROR
