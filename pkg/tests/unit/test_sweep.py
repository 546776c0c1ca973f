"""Unit tests for sweep value checking and per-value configs."""

import math

import pytest

from app.core.config import DEFAULT_GAMMA_GRID
from app.core.errors import ConfigError
from app.harness.experiment import parse_config
from app.harness.sweep import check_values, config_for_value, default_values
from app.models import SweepParameter, UnlearnMethod


@pytest.fixture()
def cfg():
    return parse_config(
        {
            "dataset": {
                "kind": "blobs",
                "n_per_class": 10,
                "n_classes": 2,
                "n_features": 2,
                "spread": 0.2,
            },
            "scenario": {"kind": "random", "fraction": 0.2},
            "methods": ["retrain", "ufg", "cufg"],
            "unlearn": {"cufg": {"epochs": 6}},
            "seeds": [0],
        }
    )


class TestDefaultValues:
    def test_gamma_grid(self):
        assert default_values(SweepParameter.GAMMA) == list(DEFAULT_GAMMA_GRID)
        assert len(DEFAULT_GAMMA_GRID) == 5

    def test_other_parameters_need_values(self):
        with pytest.raises(ConfigError):
            default_values(SweepParameter.N_CRITERIA)


class TestCheckValues:
    @pytest.mark.parametrize(
        "parameter,values",
        [
            (SweepParameter.GAMMA, []),
            (SweepParameter.GAMMA, [math.nan]),
            (SweepParameter.GAMMA, [-0.1]),
            (SweepParameter.GAMMA, [math.pi]),
            (SweepParameter.N_CRITERIA, [0]),
            (SweepParameter.N_CRITERIA, [1.5]),
            (SweepParameter.FORGET_FRACTION, [1.0]),
        ],
    )
    def test_rejects(self, cfg, parameter, values):
        with pytest.raises(ConfigError):
            check_values(cfg, parameter, values)

    def test_accepts_edges(self, cfg):
        check_values(cfg, SweepParameter.GAMMA, [0.0, math.pi / 2])
        check_values(cfg, SweepParameter.N_CRITERIA, [1, 3])
        check_values(cfg, SweepParameter.FORGET_FRACTION, [0.05, 0.95])


class TestConfigForValue:
    def test_gamma_reaches_both_corrected_methods(self, cfg):
        swept = config_for_value(cfg, SweepParameter.GAMMA, 0.25)
        assert swept.unlearn[UnlearnMethod.UFG].gamma == 0.25
        assert swept.unlearn[UnlearnMethod.CUFG].gamma == 0.25
        assert swept.unlearn[UnlearnMethod.CUFG].epochs == 6

    def test_n_criteria(self, cfg):
        swept = config_for_value(cfg, SweepParameter.N_CRITERIA, 3.0)
        assert swept.curriculum.n_criteria == 3

    def test_incompatible_n_criteria_is_a_config_error(self, cfg):
        with pytest.raises(ConfigError, match="divisible"):
            config_for_value(cfg, SweepParameter.N_CRITERIA, 4)

    def test_fraction(self, cfg):
        swept = config_for_value(cfg, SweepParameter.FORGET_FRACTION, 0.5)
        assert swept.scenario.fraction == 0.5

    def test_original_untouched(self, cfg):
        config_for_value(cfg, SweepParameter.FORGET_FRACTION, 0.5)
        assert cfg.scenario.fraction == 0.2
