"""Checkpoint files: {"arch": {...}, "seed": int, "params": [float, …]}.

Floats are written with Python's shortest round-trip representation (at most
17 significant digits), so load_checkpoint(save_checkpoint(p)) is bit-exact.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from app.core.errors import CheckpointError
from app.models.schema import MlpArchitecture
from app.models.validators import CHECKPOINT_SCHEMA, validate_document
from app.nn.mlp import ParamVector

logger = logging.getLogger(__name__)


def save_checkpoint(
    path: Union[str, Path], arch: MlpArchitecture, seed: int, params: ParamVector
) -> Path:
    if params.shape != (arch.n_params,):
        raise CheckpointError(str(path), [f"params shape {params.shape} != ({arch.n_params},)"])
    document = {
        "arch": arch.model_dump(mode="json"),
        "seed": int(seed),
        "params": [float(v) for v in params],
    }
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    try:
        text = json.dumps(document, indent=2, sort_keys=True, allow_nan=False)
    except ValueError as exc:
        raise CheckpointError(str(path), ["params contain non-finite values"]) from exc
    target.write_text(text + "\n")
    logger.info("Wrote %s", target)
    return target


def load_checkpoint(path: Union[str, Path]) -> tuple[MlpArchitecture, int, ParamVector]:
    target = Path(path)
    try:
        document = json.loads(target.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(str(path), [str(exc)]) from exc

    errors = validate_document(document, CHECKPOINT_SCHEMA)
    if errors:
        raise CheckpointError(str(path), errors)

    arch = MlpArchitecture.model_validate(document["arch"])
    params = np.asarray(document["params"], dtype=np.float64)
    if params.shape != (arch.n_params,):
        raise CheckpointError(
            str(path), [f"params has {params.shape[0]} entries, arch needs {arch.n_params}"]
        )
    return arch, int(document["seed"]), params
