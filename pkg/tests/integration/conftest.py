"""Shared fixtures for the end-to-end tests.

Every test gets a tiny blobs experiment (a few seconds per seed) written to a
fresh temporary directory.
"""

import json
from pathlib import Path

import pytest

from app.harness.experiment import parse_config
from app.models import ExperimentConfig


def tiny_config_dict(**overrides) -> dict:
    raw = {
        "dataset": {
            "kind": "blobs",
            "n_per_class": 40,
            "n_classes": 3,
            "n_features": 2,
            "spread": 0.35,
            "test_n_per_class": 20,
        },
        "architecture": {"hidden_widths": [8]},
        "train": {"eta": 0.05, "epochs": 10, "batch_size": 16},
        "scenario": {"kind": "random", "fraction": 0.1},
        "methods": ["retrain", "ft", "ga", "ufg", "cufg"],
        "unlearn": {"ft": {"epochs": 4}, "ufg": {"epochs": 4}, "ga": {"epochs": 2}},
        "curriculum": {"n_criteria": 2, "histogram_bins": 5},
        "mia": {"epochs": 3},
        "seeds": [0, 1],
    }
    raw.update(overrides)
    return raw


@pytest.fixture()
def tiny_raw() -> dict:
    return tiny_config_dict()


@pytest.fixture()
def tiny_config(tiny_raw) -> ExperimentConfig:
    return parse_config(tiny_raw)


@pytest.fixture()
def config_file(tmp_path: Path, tiny_raw) -> Path:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(tiny_raw))
    return path
